#pragma once

#include <stdexcept>
#include <string>

namespace proofloop {

// Root of every error the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Token budget (global or per pool) cannot admit another call.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// Only a per-group TokenPool ran dry; the run-wide budget may still have room.
class PoolExhausted : public BudgetExceeded {
 public:
  using BudgetExceeded::BudgetExceeded;
};

// Retryable backend failure (timeouts, 429, 5xx, scripted flakiness).
class TransientBackendError : public Error {
 public:
  using Error::Error;
};

// Terminal backend failure, possibly after retries were exhausted.
class BackendFailure : public Error {
 public:
  using Error::Error;
};

class GradeParseFailure : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class ExtractionFailure : public Error {
 public:
  using Error::Error;
};

class MissingSlot : public Error {
 public:
  explicit MissingSlot(std::string slot)
      : Error("missing required slot: " + slot), slot_(std::move(slot)) {}
  const std::string& slot() const noexcept { return slot_; }

 private:
  std::string slot_;
};

class UnknownSlot : public Error {
 public:
  explicit UnknownSlot(std::string slot)
      : Error("unknown slot: " + slot), slot_(std::move(slot)) {}
  const std::string& slot() const noexcept { return slot_; }

 private:
  std::string slot_;
};

class ResumeError : public Error {
 public:
  using Error::Error;
};

class VersionError : public Error {
 public:
  using Error::Error;
};

// Replay needs a deterministic (scripted) backend.
class ReplayRefused : public Error {
 public:
  using Error::Error;
};

class NoCandidates : public Error {
 public:
  NoCandidates() : Error("no candidates") {}
};

}  // namespace proofloop
