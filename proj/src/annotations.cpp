#include "bipnet/annotations.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>

namespace bipnet {

namespace {

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

void strip_bom(std::string& line) {
  if (line.size() >= 3 && line[0] == '\xEF' && line[1] == '\xBB' && line[2] == '\xBF') {
    line.erase(0, 3);
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  std::size_t b = s.find_last_not_of(" \t");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

bool parse_long(const std::string& field, long& out) {
  const std::string t = trim(field);
  if (t.empty()) return false;
  const char* begin = t.data();
  const char* end = begin + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_double(const std::string& field, double& out) {
  const std::string t = trim(field);
  if (t.empty()) return false;
  const char* begin = t.data();
  const char* end = begin + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

// Runs fn per non-empty line, recovering MalformedLine-style failures into
// issues so one bad line never aborts the rest of the file.
template <typename Fn>
ParseResult for_each_line(std::istream& in, Fn&& fn) {
  ParseResult result;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) strip_bom(line);
    strip_cr(line);
    if (trim(line).empty()) continue;
    try {
      fn(line, result.records);
    } catch (const Error& e) {
      result.issues.push_back({line_no, e.what()});
    }
  }
  return result;
}

Polygon make_polygon(std::vector<Point2> pts) {
  try {
    return Polygon(std::move(pts));
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedLine, std::string("degenerate polygon: ") + e.what());
  }
}

}  // namespace

ParseResult parse_icdar2015(std::istream& in) {
  return for_each_line(in, [](const std::string& line, std::vector<AnnotationRecord>& records) {
    // 8 coordinates, then the transcription (which may itself contain commas).
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (int i = 0; i < 8; ++i) {
      const std::size_t pos = line.find(',', start);
      if (pos == std::string::npos) {
        throw Error(ErrorCode::MalformedLine, "expected 8 coordinates and a transcription");
      }
      fields.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
    const std::string transcription = line.substr(start);

    std::vector<Point2> pts(4);
    for (int i = 0; i < 4; ++i) {
      long x, y;
      if (!parse_long(fields[2 * i], x) || !parse_long(fields[2 * i + 1], y)) {
        throw Error(ErrorCode::MalformedLine, "non-integer coordinate");
      }
      pts[i] = {static_cast<double>(x), static_cast<double>(y)};
    }
    records.push_back({make_polygon(std::move(pts)), trim(transcription) == "###",
                       AnnotationSource::Icdar2015});
  });
}

ParseResult parse_ctw1500(std::istream& in, CtwMode mode) {
  return for_each_line(in, [mode](const std::string& line, std::vector<AnnotationRecord>& records) {
    const std::vector<std::string> fields = split(line, ',');
    const std::size_t expected = mode == CtwMode::Absolute ? 28 : 32;
    if (fields.size() != expected) {
      throw Error(ErrorCode::MalformedLine,
                  "expected " + std::to_string(expected) + " fields, got " +
                      std::to_string(fields.size()));
    }
    std::vector<long> nums(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (!parse_long(fields[i], nums[i])) {
        throw Error(ErrorCode::MalformedLine, "non-integer field");
      }
    }
    double off_x = 0.0, off_y = 0.0;
    std::size_t first = 0;
    if (mode == CtwMode::BboxOffset) {
      off_x = static_cast<double>(nums[0]);
      off_y = static_cast<double>(nums[1]);
      first = 4;
    }
    std::vector<Point2> pts(14);
    for (int i = 0; i < 14; ++i) {
      pts[i] = {off_x + nums[first + 2 * i], off_y + nums[first + 2 * i + 1]};
    }
    records.push_back({make_polygon(std::move(pts)), false, AnnotationSource::Ctw1500});
  });
}

ParseResult parse_msra_td500(std::istream& in) {
  return for_each_line(in, [](const std::string& line, std::vector<AnnotationRecord>& records) {
    std::istringstream ss(line);
    std::vector<std::string> fields;
    std::string tok;
    while (ss >> tok) fields.push_back(tok);
    if (fields.size() != 7) {
      throw Error(ErrorCode::MalformedLine,
                  "expected 7 fields, got " + std::to_string(fields.size()));
    }
    long index, difficulty, x, y, w, h;
    double theta;
    if (!parse_long(fields[0], index) || !parse_long(fields[1], difficulty) ||
        !parse_long(fields[2], x) || !parse_long(fields[3], y) || !parse_long(fields[4], w) ||
        !parse_long(fields[5], h) || !parse_double(fields[6], theta)) {
      throw Error(ErrorCode::MalformedLine, "unparseable field");
    }
    const double cx = x + w / 2.0;
    const double cy = y + h / 2.0;
    const double ct = std::cos(theta), st = std::sin(theta);
    std::vector<Point2> pts;
    pts.reserve(4);
    for (const auto& [dx, dy] : {std::pair{-w / 2.0, -h / 2.0}, {w / 2.0, -h / 2.0},
                                 {w / 2.0, h / 2.0}, {-w / 2.0, h / 2.0}}) {
      pts.push_back({cx + ct * dx - st * dy, cy + st * dx + ct * dy});
    }
    records.push_back({make_polygon(std::move(pts)), difficulty == 1,
                       AnnotationSource::MsraTd500});
  });
}

ParseResult parse_synth(std::istream& in) {
  return for_each_line(in, [](const std::string& line, std::vector<AnnotationRecord>& records) {
    const std::vector<std::string> fields = split(line, ',');
    if (fields.size() < 6 || fields.size() % 2 != 0) {
      throw Error(ErrorCode::MalformedLine, "expected an even count (>= 6) of coordinates");
    }
    std::vector<Point2> pts(fields.size() / 2);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double x, y;
      if (!parse_double(fields[2 * i], x) || !parse_double(fields[2 * i + 1], y)) {
        throw Error(ErrorCode::MalformedLine, "non-numeric coordinate");
      }
      pts[i] = {x, y};
    }
    records.push_back({make_polygon(std::move(pts)), false, AnnotationSource::Synth});
  });
}

std::string format_synth_line(const Polygon& poly) {
  std::string out;
  char buf[64];
  for (const Point2& p : poly.vertices()) {
    std::snprintf(buf, sizeof(buf), "%.4f,%.4f", p.x, p.y);
    if (!out.empty()) out += ',';
    out += buf;
  }
  return out;
}

}  // namespace bipnet
