#pragma once

#include <string>

#include "iparc/program.hpp"

namespace iparc {

/// Parses the line-oriented program surface syntax:
///
///   program    := [split_line] band_line* [rule_line]
///   split_line := "Hit-Or-Miss" SEID
///   band_line  := "Band" INT SEP step
///   step       := ["Iterate" INT REPEAT] op SEID
///   op         := "Dilation" | "Erosion" | "Hit-Or-Miss"
///   rule_line  := ("Colour"|"Color") "rule" ":" [[b1,b2,out],...]
///
/// SEP is "-" or an en-dash; REPEAT is "x", "×" or "times". Keywords are
/// case-insensitive and lines are whitespace-insensitive. The rule list may
/// continue on following lines. Empty text is the empty program.
/// Throws ParseError with a line number on malformed input.
MorphProgram parse_program(const std::string& text);

/// Canonical text form: split line first, band pipelines by ascending band
/// id, "Iterate k× " prefixes only for k >= 2, colour rule last, ASCII
/// hyphen separators. parse_program(print_program(p)) == p.normalized().
std::string print_program(const MorphProgram& program);

}  // namespace iparc
