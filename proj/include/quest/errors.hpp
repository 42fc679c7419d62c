#pragma once

#include <stdexcept>
#include <string>

namespace quest {

// Root of every error raised by the library. Subclasses name the failing
// contract so callers (and the CLI) can map them to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define QUEST_DEFINE_ERROR(Name, Base)      \
  class Name : public Base {                \
   public:                                  \
    using Base::Base;                       \
  };

QUEST_DEFINE_ERROR(InvalidIdentifier, Error)
QUEST_DEFINE_ERROR(RejectedEvent, Error)
QUEST_DEFINE_ERROR(LateEvent, RejectedEvent)
QUEST_DEFINE_ERROR(ConfigError, Error)
QUEST_DEFINE_ERROR(ParameterError, Error)
QUEST_DEFINE_ERROR(FormatError, Error)

// secret sharing
QUEST_DEFINE_ERROR(ThresholdError, Error)
QUEST_DEFINE_ERROR(EncodingError, Error)
QUEST_DEFINE_ERROR(ShapeError, Error)
QUEST_DEFINE_ERROR(InterpolationError, Error)
QUEST_DEFINE_ERROR(CrossServerError, Error)

// protocols
QUEST_DEFINE_ERROR(KeyDerivationError, Error)
QUEST_DEFINE_ERROR(DecryptionError, Error)
QUEST_DEFINE_ERROR(SealingError, Error)
QUEST_DEFINE_ERROR(UnauthorizedQuery, Error)
QUEST_DEFINE_ERROR(ReconstructionThresholdError, Error)
QUEST_DEFINE_ERROR(RegistryError, Error)

// server simulation
QUEST_DEFINE_ERROR(IngestionError, Error)
QUEST_DEFINE_ERROR(QueryError, Error)
QUEST_DEFINE_ERROR(CapabilityError, Error)
QUEST_DEFINE_ERROR(ServerUnavailable, Error)

#undef QUEST_DEFINE_ERROR

}  // namespace quest
