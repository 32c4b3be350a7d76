#include "blockforge/plane.hpp"

#include <algorithm>

namespace blockforge::plane {

std::array<Fq, 3> normalize_triple(const FieldCtx& F, std::array<Fq, 3> v) {
  require(F.valid(v[0]) && F.valid(v[1]) && F.valid(v[2]),
          "coordinate out of range for this field");
  int lead = -1;
  for (int i = 0; i < 3; ++i)
    if (v[i] != 0) {
      lead = i;
      break;
    }
  require(lead >= 0, "the zero triple has no projective class");
  if (v[lead] != 1) {
    Fq s = F.inv(v[lead]);
    for (int i = lead; i < 3; ++i) v[i] = F.mul(v[i], s);
  }
  return v;
}

Plane::Plane(FieldCtxPtr ctx) : ctx_(std::move(ctx)) {
  require(static_cast<bool>(ctx_), "null field context");
}

ProjPoint Plane::point(u64 index) const {
  const u64 qq = q();
  require(index < size(), "point index out of range");
  ProjPoint pt;
  if (index == 0) {
    pt.c = {0, 0, 1};
  } else if (index <= qq) {
    pt.c = {0, 1, static_cast<Fq>(index - 1)};
  } else {
    u64 i = index - 1 - qq;
    pt.c = {1, static_cast<Fq>(i / qq), static_cast<Fq>(i % qq)};
  }
  return pt;
}

u64 Plane::point_index(const ProjPoint& pt) const {
  const u64 qq = q();
  if (pt.c[0] == 1) return 1 + qq + static_cast<u64>(pt.c[1]) * qq + pt.c[2];
  if (pt.c[1] == 1) return 1 + pt.c[2];
  return 0;
}

ProjLine Plane::line(u64 index) const {
  ProjPoint pt = point(index);
  return ProjLine{pt.c};
}

u64 Plane::line_index(const ProjLine& ln) const {
  return point_index(ProjPoint{ln.c});
}

ProjPoint Plane::make_point(Fq x, Fq y, Fq z) const {
  return ProjPoint{normalize_triple(*ctx_, {x, y, z})};
}

ProjLine Plane::make_line(Fq a, Fq b, Fq c) const {
  return ProjLine{normalize_triple(*ctx_, {a, b, c})};
}

bool Plane::incident(const ProjPoint& pt, const ProjLine& ln) const {
  const FieldCtx& F = *ctx_;
  Fq acc = F.mul(pt.c[0], ln.c[0]);
  acc = F.add(acc, F.mul(pt.c[1], ln.c[1]));
  acc = F.add(acc, F.mul(pt.c[2], ln.c[2]));
  return acc == 0;
}

std::vector<ProjPoint> Plane::points_on_line(const ProjLine& ln) const {
  const FieldCtx& F = *ctx_;
  const Fq a = ln.c[0], b = ln.c[1], c = ln.c[2];
  std::vector<ProjPoint> out;
  out.reserve(q() + 1);
  // Generated directly in canonical order via the case split on the leading
  // coordinate of the point.
  if (c == 0) out.push_back(ProjPoint{{0, 0, 1}});
  if (c != 0) {
    out.push_back(ProjPoint{{0, 1, F.neg(F.div(b, c))}});
  } else if (b == 0) {
    for (u32 z = 0; z < q(); ++z)
      out.push_back(ProjPoint{{0, 1, static_cast<Fq>(z)}});
  }
  if (c != 0) {
    Fq cinv = F.inv(c);
    for (u32 y = 0; y < q(); ++y) {
      Fq z = F.neg(F.mul(F.add(a, F.mul(b, static_cast<Fq>(y))), cinv));
      out.push_back(ProjPoint{{1, static_cast<Fq>(y), z}});
    }
  } else if (b != 0) {
    Fq y = F.neg(F.div(a, b));
    for (u32 z = 0; z < q(); ++z)
      out.push_back(ProjPoint{{1, y, static_cast<Fq>(z)}});
  }
  invariant(out.size() == q() + 1, "a line must carry q + 1 points");
  return out;
}

std::vector<u64> Plane::point_indices_on_line(const ProjLine& ln) const {
  auto pts = points_on_line(ln);
  std::vector<u64> out;
  out.reserve(pts.size());
  for (const auto& pt : pts) out.push_back(point_index(pt));
  return out;
}

std::pair<ProjPoint, ProjPoint> Plane::line_basis(const ProjLine& ln) const {
  const FieldCtx& F = *ctx_;
  const Fq a = ln.c[0], b = ln.c[1], c = ln.c[2];
  // First two points of points_on_line without materializing the list.
  if (c == 0) {
    ProjPoint p0{{0, 0, 1}};
    if (b == 0) return {p0, ProjPoint{{0, 1, 0}}};
    return {p0, ProjPoint{{1, F.neg(F.div(a, b)), 0}}};
  }
  ProjPoint p0{{0, 1, F.neg(F.div(b, c))}};
  ProjPoint p1{{1, 0, F.neg(F.div(a, c))}};
  return {p0, p1};
}

ProjLine Plane::line_through(const ProjPoint& a, const ProjPoint& b) const {
  const FieldCtx& F = *ctx_;
  std::array<Fq, 3> cr{
      F.sub(F.mul(a.c[1], b.c[2]), F.mul(a.c[2], b.c[1])),
      F.sub(F.mul(a.c[2], b.c[0]), F.mul(a.c[0], b.c[2])),
      F.sub(F.mul(a.c[0], b.c[1]), F.mul(a.c[1], b.c[0]))};
  require(cr[0] != 0 || cr[1] != 0 || cr[2] != 0,
          "coincident points span no line");
  return ProjLine{normalize_triple(F, cr)};
}

std::vector<ProjLine> Plane::lines_through(const ProjPoint& pt) const {
  // Dual statement of points_on_line: lines (a,b,c) with a*x+b*y+c*z = 0.
  ProjLine as_line{pt.c};
  auto duals = points_on_line(as_line);
  std::vector<ProjLine> out;
  out.reserve(duals.size());
  for (const auto& d : duals) out.push_back(ProjLine{d.c});
  return out;
}

ProjLine Plane::line_from_bc(Fq b, Fq c) const {
  const FieldCtx& F = *ctx_;
  return make_line(b, c, F.neg(1));
}

std::vector<ProjLine> Plane::lines_through_z_vertex() const {
  // Lines with zero z-coefficient, i.e. through [0:0:1].
  std::vector<ProjLine> out;
  out.reserve(q() + 1);
  out.push_back(ProjLine{{0, 1, 0}});
  for (u32 b = 0; b < q(); ++b)
    out.push_back(ProjLine{{1, static_cast<Fq>(b), 0}});
  return out;
}

ProjLine Plane::line_from_uv(Fq u, Fq v) const { return make_line(u, 1, v); }

std::vector<ProjLine> Plane::lines_through_y_vertex() const {
  // Lines with zero y-coefficient, i.e. through [0:1:0].
  std::vector<ProjLine> out;
  out.reserve(q() + 1);
  out.push_back(ProjLine{{0, 0, 1}});
  for (u32 c = 0; c < q(); ++c)
    out.push_back(ProjLine{{1, 0, static_cast<Fq>(c)}});
  return out;
}

}  // namespace blockforge::plane
