#pragma once

#include <stdexcept>
#include <string>

namespace hcp {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// The parser could not produce any tree at all.
class ParseFailure : public Error {
 public:
  explicit ParseFailure(const std::string& what) : Error(what) {}
};

/// Two rewrites target overlapping spans of the same tree.
class RewriteConflict : public Error {
 public:
  explicit RewriteConflict(const std::string& what) : Error(what) {}
};

/// A record was rejected by the anonymization stage (parse errors above
/// the configured threshold). Batch callers skip and log, not abort.
class LseRejected : public Error {
 public:
  explicit LseRejected(const std::string& what) : Error(what) {}
};

/// Split ratios are negative or do not sum to 1.
class BadRatios : public Error {
 public:
  explicit BadRatios(const std::string& what) : Error(what) {}
};

class EmptySequence : public Error {
 public:
  explicit EmptySequence(const std::string& what) : Error(what) {}
};

class NonPositiveInput : public Error {
 public:
  explicit NonPositiveInput(const std::string& what) : Error(what) {}
};

class EmptyReference : public Error {
 public:
  explicit EmptyReference(const std::string& what) : Error(what) {}
};

class ReferenceUnparseable : public Error {
 public:
  explicit ReferenceUnparseable(const std::string& what) : Error(what) {}
};

class EmptyCorpus : public Error {
 public:
  explicit EmptyCorpus(const std::string& what) : Error(what) {}
};

/// Non-retryable HTTP failure; message carries status and a body excerpt.
class HttpError : public Error {
 public:
  explicit HttpError(const std::string& what) : Error(what) {}
};

class TimeoutError : public Error {
 public:
  explicit TimeoutError(const std::string& what) : Error(what) {}
};

class MalformedResponse : public Error {
 public:
  explicit MalformedResponse(const std::string& what) : Error(what) {}
};

class SpawnError : public Error {
 public:
  explicit SpawnError(const std::string& what) : Error(what) {}
};

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& what) : Error(what) {}
};

class ChildExited : public Error {
 public:
  explicit ChildExited(const std::string& what) : Error(what) {}
};

}  // namespace hcp
