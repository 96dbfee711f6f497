#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bipnet/geometry.hpp"

namespace bipnet {

enum class AnnotationSource { Icdar2015, Ctw1500, MsraTd500, Synth };

struct AnnotationRecord {
  Polygon polygon;
  bool ignore = false;  // don't-care region
  AnnotationSource source = AnnotationSource::Synth;
};

/// One recovered parse failure; parsing never aborts remaining lines.
struct ParseIssue {
  int line = 0;  // 1-based
  std::string message;
};

struct ParseResult {
  std::vector<AnnotationRecord> records;
  std::vector<ParseIssue> issues;
};

enum class CtwMode { Absolute, BboxOffset };

/// x1,y1,...,x4,y4,transcription per line; "###" marks don't-care. A UTF-8
/// byte-order mark on the first line is tolerated.
ParseResult parse_icdar2015(std::istream& in);

/// Absolute mode: 28 comma-separated integers = 14 points. Bbox-offset mode:
/// 4 bbox integers then 28 offsets relative to the bbox top-left corner.
ParseResult parse_ctw1500(std::istream& in, CtwMode mode = CtwMode::Absolute);

/// index difficulty x y w h rotation(radians); the box rotates about its
/// center; difficulty 1 marks don't-care.
ParseResult parse_msra_td500(std::istream& in);

/// Comma-separated float coordinates x1,y1,...,xk,yk (k >= 3), one polygon
/// per line; the format synth_generate writes.
ParseResult parse_synth(std::istream& in);

std::string format_synth_line(const Polygon& poly);

}  // namespace bipnet
