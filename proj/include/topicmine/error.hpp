#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace topicmine {

enum class Errc {
  MalformedRecord,
  DuplicateId,
  UnreadablePath,
  NonUtf8Content,
  InvalidThresholds,
  InvalidN,
  EmptyVocabulary,
  EmptyCorpus,
  NonFiniteValue,
  InvalidConfig,
  DegenerateTopics,
  DimensionMismatch,
  EmptyGroup,
  NoDatedDocuments,
  MalformedArchive,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedRecord: return "MalformedRecord";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::UnreadablePath: return "UnreadablePath";
    case Errc::NonUtf8Content: return "NonUtf8Content";
    case Errc::InvalidThresholds: return "InvalidThresholds";
    case Errc::InvalidN: return "InvalidN";
    case Errc::EmptyVocabulary: return "EmptyVocabulary";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::DegenerateTopics: return "DegenerateTopics";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::EmptyGroup: return "EmptyGroup";
    case Errc::NoDatedDocuments: return "NoDatedDocuments";
    case Errc::MalformedArchive: return "MalformedArchive";
  }
  return "Unknown";
}

// Every failure raised by the library carries one of the codes above; the
// message is prefixed with the code name so it survives a plain what().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace topicmine
