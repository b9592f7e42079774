#include <doctest.h>

#include <algorithm>
#include <set>

#include "fatpad/error.hpp"
#include "fatpad/fatpad_map.hpp"
#include "fixtures.hpp"

using namespace fatpad;
using fixtures::DiscScene;
using fixtures::PadSpec;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("disc pad loads with its rim as the border") {
  const DiscScene s;
  const auto json = fixtures::map_json({{"disc", "upper", s.pad_vertices(10), {}, {{"h", 0}}}});
  const FatPadMap map = load_map(json, s.mesh);
  const FatPad& pad = map.pad("disc");
  auto rim = s.rim(10);
  std::sort(rim.begin(), rim.end());
  CHECK(pad.border == rim);
  CHECK(map.handle("h").rest_position == s.mesh.position(0));
  const auto loops = pad_border_loops(pad, s.mesh);
  REQUIRE(loops.size() == 1);
  CHECK(loops[0].size() == rim.size());
}

TEST_CASE("movable border must lie on the computed border") {
  const DiscScene s;
  const VertexId interior = DiscScene::ring_vertex(5, 3);
  const auto json = fixtures::map_json({{"disc", "upper", s.pad_vertices(10), {interior}, {{"h", 0}}}});
  try {
    load_map(json, s.mesh);
    FAIL("expected validation error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Validation);
    const std::string msg = e.what();
    CHECK(msg.find("disc") != std::string::npos);
    CHECK(msg.find(std::to_string(interior)) != std::string::npos);
  }
}

TEST_CASE("map validation errors") {
  const DiscScene s;
  const auto verts = s.pad_vertices(10);
  CHECK(code_of([&] { load_map(fixtures::map_json({{"a", "upper", {0, 999999}, {}, {{"h", 0}}}}), s.mesh); }) ==
        ErrorCode::Validation);
  CHECK(code_of([&] {
          load_map(fixtures::map_json({{"a", "upper", verts, {}, {{"h", 0}}}, {"a", "upper", verts, {}, {{"g", 1}}}}),
                   s.mesh);
        }) == ErrorCode::Validation);
  CHECK(code_of([&] {
          load_map(fixtures::map_json({{"a", "upper", verts, {}, {{"h", 0}}}, {"b", "lower", verts, {}, {{"h", 1}}}}),
                   s.mesh);
        }) == ErrorCode::Validation);
  // anchor on the border
  CHECK(code_of([&] {
          load_map(fixtures::map_json({{"a", "upper", verts, {}, {{"h", DiscScene::ring_vertex(10, 0)}}}}), s.mesh);
        }) == ErrorCode::Validation);
  CHECK(code_of([&] { load_map(fixtures::map_json({{"a", "upper", verts, {}, {}}}), s.mesh); }) ==
        ErrorCode::Validation);
  CHECK(code_of([&] { load_map(fixtures::map_json({{"a", "middle", verts, {}, {{"h", 0}}}}), s.mesh); }) ==
        ErrorCode::Parse);
  CHECK(code_of([&] { load_map("{\"pads\": [", s.mesh); }) == ErrorCode::Parse);
}

TEST_CASE("overlapping pads are legal") {
  const DiscScene s;
  const auto a = s.pad_vertices(10);
  std::vector<VertexId> b;
  for (VertexId v : a) {
    if (s.mesh.position(v).x() > -0.03) b.push_back(v);
  }
  const FatPadMap map = load_map(
      fixtures::map_json({{"a", "upper", a, {}, {{"ha", 0}}}, {"b", "lower", b, {}, {{"hb", DiscScene::ring_vertex(4, 0)}}}}),
      s.mesh);
  std::set<VertexId> shared;
  for (VertexId v : map.pad("b").vertices) {
    if (map.pad("a").contains(v)) shared.insert(v);
  }
  CHECK(shared.size() == b.size());
  CHECK(map.handles_in(Region::Lower).size() == 1);
}

TEST_CASE("transfer rebinds positions and rejects other topologies") {
  const DiscScene s;
  const FatPadMap map = load_map(fixtures::map_json({{"disc", "upper", s.pad_vertices(10), {}, {{"h", 5}}}}), s.mesh);
  std::vector<Vec3> p = s.mesh.positions();
  for (Vec3& v : p) v += Vec3(0.1, 0.2, 0.3 * v.x());
  const TriMesh moved(p, s.mesh.triangles());
  const FatPadMap t = transfer_map(map, moved);
  CHECK(t.pad("disc").vertices == map.pad("disc").vertices);
  CHECK(t.handle("h").rest_position == moved.position(5));
  const FatPadMap tt = transfer_map(t, moved);
  CHECK(save_map(tt) == save_map(t));
  CHECK(transfer_map(map, s.mesh).handle("h").rest_position == map.handle("h").rest_position);

  p.push_back(Vec3(9, 9, 9));
  const TriMesh extra(p, s.mesh.triangles());
  CHECK(code_of([&] { transfer_map(map, extra); }) == ErrorCode::TopologyMismatch);
  CHECK(code_of([&] { load_map(save_map(map), extra); }) == ErrorCode::TopologyMismatch);
}

TEST_CASE("save and load round-trip") {
  const DiscScene s;
  PadSpec spec{"nose", "upper", s.pad_vertices(10), s.rim(10), {{"n1", 0}}, "z"};
  const FatPadMap map = load_map(fixtures::map_json({spec}), s.mesh);
  CHECK(map.handle("n1").axis_mask == Vec3(0, 0, 1));
  const FatPadMap again = load_map(save_map(map), s.mesh);
  CHECK(save_map(again) == save_map(map));
  CHECK(again.hash() == map.hash());
}

TEST_CASE("border loops: annulus has two, closed sphere none") {
  const DiscScene s;
  std::vector<VertexId> ring;
  for (int r = 3; r <= 9; ++r) {
    for (int k = 0; k < DiscScene::kSegments; ++k) ring.push_back(DiscScene::ring_vertex(r, k));
  }
  const FatPadMap map =
      load_map(fixtures::map_json({{"ann", "upper", ring, {}, {{"h", DiscScene::ring_vertex(6, 0)}}}}), s.mesh);
  const auto loops = pad_border_loops(map.pad("ann"), s.mesh);
  CHECK(loops.size() == 2);
  std::size_t total = 0;
  for (const auto& l : loops) total += l.size();
  CHECK(total == map.pad("ann").border.size());

  const TriMesh sphere = make_icosphere(2);
  std::vector<VertexId> all(sphere.vertex_count());
  for (VertexId v = 0; v < all.size(); ++v) all[v] = v;
  const FatPadMap whole = load_map(fixtures::map_json({{"all", "upper", all, {}, {{"h", 0}}}}), sphere);
  CHECK(whole.pad("all").border.empty());
  CHECK(pad_border_loops(whole.pad("all"), sphere).empty());
}

TEST_CASE("pinched pad border is reported") {
  // two disc sectors that touch only at the center vertex
  const DiscScene s;
  std::vector<VertexId> bow = {0};
  for (int r = 1; r <= 6; ++r) {
    for (int k : {0, 1, 2, 3, 16, 17, 18, 19}) bow.push_back(DiscScene::ring_vertex(r, k));
  }
  const FatPadMap map =
      load_map(fixtures::map_json({{"bow", "upper", bow, {}, {{"h", DiscScene::ring_vertex(3, 1)}}}}), s.mesh);
  try {
    pad_border_loops(map.pad("bow"), s.mesh);
    FAIL("expected non-manifold border error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidTopology);
    CHECK(std::string(e.what()).find(" 0") != std::string::npos);
  }
}
