#pragma once

#include <stdexcept>
#include <string>

namespace iparc {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Program text could not be parsed. Carries the 1-based line number and a
/// description of what was expected.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

/// A program references an SE id that the library does not contain.
class UnresolvedSeError : public Error {
 public:
  explicit UnresolvedSeError(const std::string& se_id)
      : Error("unresolved structuring element '" + se_id + "'"), se_id_(se_id) {}
  const std::string& se_id() const { return se_id_; }

 private:
  std::string se_id_;
};

/// A colour rule has no row for a (b1, b2) combination that occurs in the
/// bands it is applied to.
class IncompleteRuleError : public Error {
 public:
  IncompleteRuleError(int b1, int b2)
      : Error("colour rule has no row for bands (" + std::to_string(b1) + ", " +
              std::to_string(b2) + ")"),
        b1_(b1),
        b2_(b2) {}
  int b1() const { return b1_; }
  int b2() const { return b2_; }

 private:
  int b1_, b2_;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A JSON document does not match the expected schema. Carries the path of
/// the offending field.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Task generation could not produce non-degenerate pairs for a sampled
/// program within the rejection budget; the caller resamples the program.
class DegenerateProgramError : public Error {
 public:
  using Error::Error;
};

}  // namespace iparc
