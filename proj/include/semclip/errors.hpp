#pragma once

#include <stdexcept>

namespace semclip {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operand shapes do not fit the operation.
struct ShapeError : Error { using Error::Error; };
// Vector (or projection) too close to zero to normalize or compare.
struct DegenerateError : Error { using Error::Error; };
// Index outside its valid range.
struct IndexError : Error { using Error::Error; };
// Caller violated an API contract.
struct ContractError : Error { using Error::Error; };
// Token not present in the closed vocabulary.
struct VocabError : Error { using Error::Error; };
// Dataset or artifact content problem.
struct DataError : Error { using Error::Error; };
// Checkpoint parse or compatibility problem.
struct CheckpointError : Error { using Error::Error; };
// Non-finite value where a finite one is required.
struct NumericError : Error { using Error::Error; };

}  // namespace semclip
