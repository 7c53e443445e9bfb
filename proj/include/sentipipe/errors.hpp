#pragma once

#include <stdexcept>
#include <string>

namespace sentipipe {

// Base of every error the pipeline raises. The CLI maps the category to an
// exit code, so each concrete error picks exactly one.
class Error : public std::runtime_error {
 public:
  enum class Category { Io, Validation, Degenerate, Usage };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(Category::Io, what) {}
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what) : Error(Category::Validation, what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(Category::Validation, what) {}
};

class UnknownAuName : public Error {
 public:
  explicit UnknownAuName(const std::string& name)
      : Error(Category::Validation, "unknown AU name '" + name + "'") {}
};

class UnknownAdId : public Error {
 public:
  explicit UnknownAdId(const std::string& ad_id)
      : Error(Category::Validation, "unknown ad_id '" + ad_id + "'") {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(Category::Usage, what) {}
};

class DegenerateTrainingSet : public Error {
 public:
  explicit DegenerateTrainingSet(const std::string& what)
      : Error(Category::Degenerate, "DegenerateTrainingSet: " + what) {}
};

class NoPredictions : public Error {
 public:
  explicit NoPredictions(const std::string& what)
      : Error(Category::Degenerate, "NoPredictions: " + what) {}
};

class EmptyInterval : public Error {
 public:
  explicit EmptyInterval(const std::string& what)
      : Error(Category::Validation, "EmptyInterval: " + what) {}
};

class EmptyScoreList : public Error {
 public:
  explicit EmptyScoreList(const std::string& what)
      : Error(Category::Degenerate, "EmptyScoreList: " + what) {}
};

class InsufficientAds : public Error {
 public:
  explicit InsufficientAds(const std::string& what)
      : Error(Category::Degenerate, "InsufficientAds: " + what) {}
};

class NoMoments : public Error {
 public:
  explicit NoMoments(const std::string& what)
      : Error(Category::Degenerate, "NoMoments: " + what) {}
};

class DegenerateComplement : public Error {
 public:
  explicit DegenerateComplement(const std::string& what)
      : Error(Category::Degenerate, "DegenerateComplement: " + what) {}
};

}  // namespace sentipipe
