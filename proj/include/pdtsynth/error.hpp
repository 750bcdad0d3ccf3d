#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pdt {

enum class ErrorCode {
  MalformedLine,
  DuplicateWord,
  EmptyList,
  KTooLarge,
  InvalidArgument,
  AuthError,
  TransientExhausted,
  MalformedProviderReply,
  RequestRejected,
  ScriptExhausted,
  UnparseableReply,
  UnparseableCsvReply,
  PipelineStalled,
  WrongPromptKind,
  LengthMismatch,
  OutOfRange,
  EmptyCorpus,
  SingleDocument,
  MissingUsage,
  ZeroRows,
  IoError,
  SchemaMismatch,
  ConfigError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::DuplicateWord: return "DuplicateWord";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::AuthError: return "AuthError";
    case ErrorCode::TransientExhausted: return "TransientExhausted";
    case ErrorCode::MalformedProviderReply: return "MalformedProviderReply";
    case ErrorCode::RequestRejected: return "RequestRejected";
    case ErrorCode::ScriptExhausted: return "ScriptExhausted";
    case ErrorCode::UnparseableReply: return "UnparseableReply";
    case ErrorCode::UnparseableCsvReply: return "UnparseableCsvReply";
    case ErrorCode::PipelineStalled: return "PipelineStalled";
    case ErrorCode::WrongPromptKind: return "WrongPromptKind";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::SingleDocument: return "SingleDocument";
    case ErrorCode::MissingUsage: return "MissingUsage";
    case ErrorCode::ZeroRows: return "ZeroRows";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// Provider failures that a batch driver may count toward a stall and retry.
  bool is_provider_failure() const noexcept {
    return code_ == ErrorCode::TransientExhausted || code_ == ErrorCode::MalformedProviderReply ||
           code_ == ErrorCode::UnparseableReply || code_ == ErrorCode::UnparseableCsvReply;
  }

 private:
  ErrorCode code_;
};

}  // namespace pdt
