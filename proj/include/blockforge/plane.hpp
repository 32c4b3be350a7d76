#pragma once

#include <array>
#include <vector>

#include "blockforge/gf.hpp"

namespace blockforge::plane {

using gf::FieldCtx;
using gf::FieldCtxPtr;
using gf::Fq;

// Normalized homogeneous coordinates: first nonzero entry scaled to 1.
// Canonical index order = lexicographic on the coordinate triple under the
// canonical element order, so [0:0:1] < [0:1:z] < [1:y:z].
struct ProjPoint {
  std::array<Fq, 3> c{0, 0, 0};
  bool operator==(const ProjPoint&) const = default;
  bool operator<(const ProjPoint& o) const { return c < o.c; }
};

// Lines are dual points: coefficient triple (a, b, c) of ax + by + cz = 0,
// normalized the same way and sharing the same index scheme.
struct ProjLine {
  std::array<Fq, 3> c{0, 0, 0};
  bool operator==(const ProjLine&) const = default;
  bool operator<(const ProjLine& o) const { return c < o.c; }
};

std::array<Fq, 3> normalize_triple(const FieldCtx& F, std::array<Fq, 3> v);

class Plane {
 public:
  explicit Plane(FieldCtxPtr ctx);

  const FieldCtx& field() const { return *ctx_; }
  const FieldCtxPtr& ctx() const { return ctx_; }
  u32 q() const { return ctx_->q; }
  // Number of points = number of lines = q^2 + q + 1.
  u64 size() const { return static_cast<u64>(q()) * q() + q() + 1; }

  ProjPoint point(u64 index) const;
  ProjLine line(u64 index) const;
  u64 point_index(const ProjPoint& pt) const;
  u64 line_index(const ProjLine& ln) const;

  ProjPoint make_point(Fq x, Fq y, Fq z) const;
  ProjLine make_line(Fq a, Fq b, Fq c) const;

  bool incident(const ProjPoint& pt, const ProjLine& ln) const;

  // The q + 1 points of a line, in canonical order.
  std::vector<ProjPoint> points_on_line(const ProjLine& ln) const;
  // Same, as point indices.
  std::vector<u64> point_indices_on_line(const ProjLine& ln) const;
  // The two smallest points of the line in canonical order; these fixed
  // representatives parametrize every restriction of a curve to the line.
  std::pair<ProjPoint, ProjPoint> line_basis(const ProjLine& ln) const;

  ProjLine line_through(const ProjPoint& a, const ProjPoint& b) const;
  std::vector<ProjLine> lines_through(const ProjPoint& pt) const;

  // Affine chart used by the conic census: (b, c) -> bx + cy - z = 0. The
  // chart covers the q^2 lines missing [0:0:1]; its complement is
  // lines_through_z_vertex().
  ProjLine line_from_bc(Fq b, Fq c) const;
  std::vector<ProjLine> lines_through_z_vertex() const;

  // Chart used by the pencil construction: (u, v) -> ux + y + vz = 0, the
  // q^2 lines with nonzero y-coefficient; the complement (lines through
  // [0:1:0]) is lines_through_y_vertex().
  ProjLine line_from_uv(Fq u, Fq v) const;
  std::vector<ProjLine> lines_through_y_vertex() const;

 private:
  FieldCtxPtr ctx_;
};

}  // namespace blockforge::plane
