#pragma once

#include <stdexcept>
#include <string>

namespace faq {

// Error kinds map 1:1 onto CLI exit codes.
enum class ErrKind : int {
  User = 1,        // bad input: syntax, missing file, mismatched declarations
  Structural = 2,  // input violates a structural precondition (e.g. not beta-acyclic)
  SizeCap = 3,     // instance exceeds a configured desk-scale cap
  Internal = 4,    // broken internal invariant
};

class Error : public std::runtime_error {
 public:
  Error(ErrKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrKind kind() const { return kind_; }

 private:
  ErrKind kind_;
};

[[noreturn]] inline void fail(ErrKind kind, const std::string& msg) { throw Error(kind, msg); }
[[noreturn]] inline void fail_user(const std::string& msg) { fail(ErrKind::User, msg); }
[[noreturn]] inline void fail_structural(const std::string& msg) { fail(ErrKind::Structural, msg); }
[[noreturn]] inline void fail_cap(const std::string& msg) { fail(ErrKind::SizeCap, msg); }
[[noreturn]] inline void fail_internal(const std::string& msg) { fail(ErrKind::Internal, msg); }

inline void require(bool cond, ErrKind kind, const std::string& msg) {
  if (!cond) fail(kind, msg);
}

}  // namespace faq
