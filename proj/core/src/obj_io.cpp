#include "fatpad/obj_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "fatpad/error.hpp"

namespace fatpad {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": " + what);
}

double parse_double(std::string_view tok, std::size_t line) {
  double value = 0.0;
  const char* first = tok.data();
  if (!tok.empty() && tok.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    fail(line, "invalid number '" + std::string(tok) + "'");
  return value;
}

long parse_index(std::string_view tok, std::size_t line) {
  // "v", "v/vt", "v//vn", "v/vt/vn": only the position index matters.
  const auto slash = tok.find('/');
  const auto head = tok.substr(0, slash);
  long value = 0;
  auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), value);
  if (head.empty() || ec != std::errc() || ptr != head.data() + head.size() || value == 0)
    fail(line, "invalid face index '" + std::string(tok) + "'");
  return value;
}

void append_double(std::string& out, double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, end);
}

}  // namespace

TriMesh load_obj(std::string_view text) {
  struct PendingFace {
    std::vector<long> idx;
    std::size_t line;
  };
  std::vector<Vec3> positions;
  std::vector<PendingFace> faces;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    auto line = trim(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = trim(line.substr(0, hash));
    if (line.empty()) {
      if (nl == std::string_view::npos) break;
      continue;
    }
    const auto tokens = split_ws(line);
    const auto kw = tokens.front();
    if (kw == "v") {
      // Optional w or per-vertex color components after xyz are ignored.
      if (tokens.size() < 4) fail(line_no, "vertex record needs 3 coordinates");
      positions.emplace_back(parse_double(tokens[1], line_no), parse_double(tokens[2], line_no),
                             parse_double(tokens[3], line_no));
    } else if (kw == "f") {
      if (tokens.size() < 4) fail(line_no, "face record needs at least 3 vertices");
      PendingFace f{{}, line_no};
      for (std::size_t k = 1; k < tokens.size(); ++k) {
        long idx = parse_index(tokens[k], line_no);
        // Negative indices are relative to the vertices read so far.
        if (idx < 0) idx = static_cast<long>(positions.size()) + idx + 1;
        f.idx.push_back(idx);
      }
      faces.push_back(std::move(f));
    }
    if (nl == std::string_view::npos) break;
  }

  if (positions.empty()) throw Error(ErrorCode::EmptyMesh, "OBJ contains no vertices");

  std::vector<Triangle> triangles;
  for (const auto& f : faces) {
    for (long idx : f.idx)
      if (idx < 1 || idx > static_cast<long>(positions.size()))
        fail(f.line, "face index " + std::to_string(idx) + " out of range (" +
                         std::to_string(positions.size()) + " vertices)");
    for (std::size_t k = 1; k + 1 < f.idx.size(); ++k) {
      Triangle tri{static_cast<VertexId>(f.idx[0] - 1), static_cast<VertexId>(f.idx[k] - 1),
                   static_cast<VertexId>(f.idx[k + 1] - 1)};
      if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
        fail(f.line, "degenerate face repeats a vertex index");
      triangles.push_back(tri);
    }
  }
  return TriMesh(std::move(positions), std::move(triangles));
}

TriMesh load_obj_file(const std::filesystem::path& path) { return load_obj(read_text_file(path)); }

std::string save_obj(const TriMesh& mesh) {
  std::string out;
  out.reserve(mesh.vertex_count() * 48 + mesh.triangle_count() * 24);
  for (const auto& p : mesh.positions()) {
    out += "v ";
    append_double(out, p.x());
    out += ' ';
    append_double(out, p.y());
    out += ' ';
    append_double(out, p.z());
    out += '\n';
  }
  for (const auto& tri : mesh.triangles()) {
    out += "f " + std::to_string(tri[0] + 1) + ' ' + std::to_string(tri[1] + 1) + ' ' +
           std::to_string(tri[2] + 1) + '\n';
  }
  return out;
}

void save_obj_file(const TriMesh& mesh, const std::filesystem::path& path) {
  write_text_file(path, save_obj(mesh));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

}  // namespace fatpad
