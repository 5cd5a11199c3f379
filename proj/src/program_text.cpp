#include "iparc/program_text.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "iparc/errors.hpp"

namespace iparc {
namespace {

// Typography varies across sources: en/em dashes for the band separator and
// "×" for the repeat marker are folded to ASCII before tokenising.
std::string normalize(const std::string& line) {
  std::string out;
  for (size_t i = 0; i < line.size();) {
    if (line.compare(i, 3, "\xE2\x80\x93") == 0 || line.compare(i, 3, "\xE2\x80\x94") == 0) {
      out += '-';
      i += 3;
    } else if (line.compare(i, 2, "\xC3\x97") == 0) {
      out += 'x';
      i += 2;
    } else {
      out += line[i];
      ++i;
    }
  }
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> tokens_of(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

bool is_integer(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

// True for rule headers like "Colour Rule:" / "color rule :"; on success,
// rest receives everything after the colon.
bool match_rule_header(const std::string& line, std::string* rest) {
  const std::string low = lower(line);
  size_t i = low.find_first_not_of(" \t");
  if (i == std::string::npos) return false;
  for (const char* kw : {"colour", "color"}) {
    const size_t n = std::string(kw).size();
    if (low.compare(i, n, kw) == 0) {
      size_t j = low.find_first_not_of(" \t", i + n);
      if (j != std::string::npos && low.compare(j, 4, "rule") == 0) {
        size_t k = low.find_first_not_of(" \t", j + 4);
        if (k != std::string::npos && low[k] == ':') {
          *rest = line.substr(k + 1);
          return true;
        }
      }
    }
  }
  return false;
}

class RuleListParser {
 public:
  RuleListParser(const std::string& text, int line) : text_(text), line_(line) {}

  std::vector<std::array<int, 3>> parse() {
    std::vector<std::array<int, 3>> rows;
    expect('[');
    skip_ws();
    if (peek() == ']') {
      ++pos_;
    } else {
      rows.push_back(triple());
      skip_ws();
      while (peek() == ',') {
        ++pos_;
        rows.push_back(triple());
        skip_ws();
      }
      expect(']');
    }
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected text after colour rule list");
    return rows;
  }

 private:
  std::array<int, 3> triple() {
    expect('[');
    const int b1 = integer();
    expect(',');
    const int b2 = integer();
    expect(',');
    const int out = integer();
    expect(']');
    return {b1, b2, out};
  }

  int integer() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an integer in the colour rule list");
    return std::stoi(text_.substr(start, pos_ - start));
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c)
      fail(std::string("expected '") + c + "' in the colour rule list");
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) { throw ParseError(line_, what); }

  const std::string& text_;
  int line_;
  size_t pos_ = 0;
};

struct LineReader {
  std::vector<std::string> lines;
  size_t next = 0;

  explicit LineReader(const std::string& text) {
    std::string cur;
    for (char c : text) {
      if (c == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur += c;
      }
    }
    if (!cur.empty()) lines.push_back(cur);
  }
};

Step parse_step(const std::vector<std::string>& toks, size_t at, int line) {
  Step step;
  size_t i = at;
  if (i >= toks.size()) throw ParseError(line, "expected a step after the band separator");
  if (lower(toks[i]) == "iterate") {
    ++i;
    if (i >= toks.size()) throw ParseError(line, "expected a count after 'Iterate'");
    std::string count_tok = toks[i];
    bool fused_marker = false;
    if (count_tok.size() > 1 && (count_tok.back() == 'x' || count_tok.back() == 'X') &&
        is_integer(count_tok.substr(0, count_tok.size() - 1))) {
      count_tok.pop_back();
      fused_marker = true;
    }
    if (!is_integer(count_tok)) throw ParseError(line, "expected an integer count after 'Iterate'");
    step.count = std::stoi(count_tok);
    if (step.count < 1) throw ParseError(line, "iteration count must be >= 1");
    ++i;
    if (!fused_marker) {
      if (i >= toks.size()) throw ParseError(line, "expected 'x' or 'times' after the count");
      const std::string marker = lower(toks[i]);
      if (marker != "x" && marker != "times")
        throw ParseError(line, "expected 'x' or 'times' after the count, got '" + toks[i] + "'");
      ++i;
    }
  }
  if (i >= toks.size())
    throw ParseError(line, "expected an operator (Dilation, Erosion or Hit-Or-Miss)");
  const std::string op = lower(toks[i]);
  if (op == "dilation")
    step.op = Step::Op::Dilation;
  else if (op == "erosion")
    step.op = Step::Op::Erosion;
  else if (op == "hit-or-miss")
    step.op = Step::Op::HitOrMiss;
  else
    throw ParseError(line, "expected Dilation, Erosion or Hit-Or-Miss, got '" + toks[i] + "'");
  ++i;
  if (i >= toks.size()) throw ParseError(line, "expected an SE id after the operator");
  step.se_id = toks[i];
  ++i;
  if (i != toks.size()) throw ParseError(line, "unexpected trailing tokens after '" + step.se_id + "'");
  return step;
}

}  // namespace

MorphProgram parse_program(const std::string& text) {
  MorphProgram program;
  LineReader reader(text);
  enum { kStart, kBands, kDone } state = kStart;
  int rule_line_no = 0;

  while (reader.next < reader.lines.size()) {
    const int line_no = static_cast<int>(reader.next) + 1;
    const std::string line = normalize(reader.lines[reader.next]);
    ++reader.next;
    std::string rule_rest;
    if (tokens_of(line).empty()) continue;

    if (match_rule_header(line, &rule_rest)) {
      if (state == kDone) throw ParseError(line_no, "duplicate colour rule");
      rule_line_no = line_no;
      // The list may start on one of the following lines and span several.
      std::string list_text = rule_rest;
      auto balance = [](const std::string& s) {
        long b = 0;
        for (char c : s) {
          if (c == '[') ++b;
          if (c == ']') --b;
        }
        return b;
      };
      auto blank = [](const std::string& s) {
        return s.find_first_not_of(" \t") == std::string::npos;
      };
      while (blank(list_text) || balance(list_text) > 0) {
        if (reader.next >= reader.lines.size())
          throw ParseError(rule_line_no, "unterminated colour rule list");
        list_text += ' ';
        list_text += normalize(reader.lines[reader.next]);
        ++reader.next;
      }
      const auto rows = RuleListParser(list_text, rule_line_no).parse();
      for (const auto& row : rows) {
        if (row[0] > 1 || row[1] > 1)
          throw ParseError(rule_line_no, "colour rule band bits must be 0 or 1");
        if (row[2] > 255) throw ParseError(rule_line_no, "colour rule output colour out of range");
      }
      try {
        program.color_rule = ColorRule(rows);
      } catch (const std::invalid_argument& e) {
        throw ParseError(rule_line_no, e.what());
      }
      state = kDone;
      continue;
    }

    const auto toks = tokens_of(line);
    if (state == kDone)
      throw ParseError(line_no, "no lines may follow the colour rule");

    if (lower(toks[0]) == "hit-or-miss") {
      if (state != kStart) throw ParseError(line_no, "the split line must come first");
      if (toks.size() < 2) throw ParseError(line_no, "expected an SE id after 'Hit-Or-Miss'");
      if (toks.size() > 2) throw ParseError(line_no, "unexpected trailing tokens on the split line");
      program.split_se = toks[1];
      state = kBands;
      continue;
    }

    if (lower(toks[0]) == "band") {
      if (toks.size() < 2 || !is_integer(toks[1]))
        throw ParseError(line_no, "expected a band number after 'Band'");
      const int band_id = std::stoi(toks[1]);
      if (band_id < 1) throw ParseError(line_no, "band ids start at 1");
      if (toks.size() < 3 || toks[2] != "-")
        throw ParseError(line_no, "expected '-' after the band number");
      program.steps_for(band_id).push_back(parse_step(toks, 3, line_no));
      state = kBands;
      continue;
    }

    throw ParseError(line_no, "expected a split line, a band line or a colour rule, got '" +
                                  toks[0] + "'");
  }

  program = program.normalized();
  if (auto problem = program.check()) throw ParseError(static_cast<int>(reader.lines.size()), *problem);
  return program;
}

std::string print_program(const MorphProgram& program) {
  const MorphProgram p = program.normalized();
  std::string out;
  if (p.split_se) {
    out += "Hit-Or-Miss " + *p.split_se;
    out += '\n';
  }
  for (const auto& pipe : p.pipelines) {
    for (const auto& step : pipe.steps) {
      out += "Band " + std::to_string(pipe.band_id) + " - ";
      if (step.count >= 2) out += "Iterate " + std::to_string(step.count) + "\xC3\x97 ";
      out += op_name(step.op) + " " + step.se_id;
      out += '\n';
    }
  }
  if (p.color_rule) {
    out += "Colour rule: [";
    bool first = true;
    for (const auto& row : p.color_rule->rows()) {
      if (!first) out += ',';
      first = false;
      out += '[' + std::to_string(row[0]) + ',' + std::to_string(row[1]) + ',' +
             std::to_string(row[2]) + ']';
    }
    out += "]\n";
  }
  return out;
}

}  // namespace iparc
