// Error type shared by every ghosteval module.

#ifndef GHOSTEVAL_ERROR_H_
#define GHOSTEVAL_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace ghosteval {

enum class ErrorKind {
  kDomain,
  kDecode,
  kValidation,
  kMissingInput,
  kMissingCheckpoint,
  kIncompleteAnnotation,
  kDegenerateFit,
  kNoIntersection,
  kUnderdetermined,
  kInsufficientPool,
  kLayout,
  kAuth,
  kForbidden,
  kNotFound,
  kInternal,
};

std::string_view error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ghosteval

#endif  // GHOSTEVAL_ERROR_H_
