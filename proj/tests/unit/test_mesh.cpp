#include <doctest.h>

#include "fatpad/primitives.hpp"

using namespace fatpad;

namespace {

double signed_volume(const TriMesh& m) {
  double v = 0.0;
  for (const Triangle& t : m.triangles()) {
    v += m.position(t[0]).dot(m.position(t[1]).cross(m.position(t[2]))) / 6.0;
  }
  return v;
}

}  // namespace

TEST_CASE("closed primitives are outward oriented") {
  CHECK(signed_volume(make_icosphere(2)) > 4.0);
  CHECK(signed_volume(make_uv_sphere(8, 12)) > 3.5);
  CHECK(signed_volume(make_box(Vec3(-1, -1, -1), Vec3(1, 1, 1))) == doctest::Approx(8.0));
  CHECK(signed_volume(make_tetrakis_box(Vec3(-1, -1, -1), Vec3(1, 1, 1))) == doctest::Approx(8.0));
}
