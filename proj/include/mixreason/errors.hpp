#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mixreason {

// Root of every error the library throws. Callers that only need a
// diagnostic can catch this; tests match on the concrete subtype.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MIXREASON_ERROR(Name)             \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

MIXREASON_ERROR(BadRatios);
MIXREASON_ERROR(EmptyCorpus);
MIXREASON_ERROR(LatentOutOfRange);
MIXREASON_ERROR(ShapeMismatch);
MIXREASON_ERROR(NonScalarLoss);
MIXREASON_ERROR(BadConfig);
MIXREASON_ERROR(BadTarget);
MIXREASON_ERROR(NoPaths);
MIXREASON_ERROR(EmptyText);
MIXREASON_ERROR(ZeroVector);
MIXREASON_ERROR(EmptyAnswer);
MIXREASON_ERROR(EmptySequence);
MIXREASON_ERROR(TooFewSequences);
MIXREASON_ERROR(AllUnionsEmpty);
MIXREASON_ERROR(CheckpointError);

#undef MIXREASON_ERROR

class MalformedLine : public Error {
 public:
  MalformedLine(std::size_t line_no, const std::string& detail)
      : Error("malformed line " + std::to_string(line_no) + ": " + detail), line_no(line_no) {}
  std::size_t line_no;
};

class UnknownRelation : public Error {
 public:
  UnknownRelation(std::size_t line_no, const std::string& token)
      : Error("unknown relation '" + token + "' on line " + std::to_string(line_no)),
        line_no(line_no),
        token(token) {}
  std::size_t line_no;
  std::string token;
};

// Raised when an output set has more targets than latent values.
class InfeasibleK : public Error {
 public:
  InfeasibleK(std::size_t targets, std::size_t latents, std::string set_id = {})
      : Error("output set " + (set_id.empty() ? std::string("<anonymous>") : set_id) + " has " +
              std::to_string(targets) + " targets but only " + std::to_string(latents) +
              " latent values"),
        targets(targets),
        latents(latents),
        set_id(std::move(set_id)) {}
  std::size_t targets;
  std::size_t latents;
  std::string set_id;
};

}  // namespace mixreason
