#pragma once

// Whole-dataset generation: per-record sub-seeds, question mix and
// parallel assembly.

#include <cstdint>
#include <string>
#include <vector>

#include "pqa/engine.hpp"
#include "pqa/lexicon.hpp"
#include "pqa/qa_gen.hpp"
#include "pqa/record.hpp"

namespace pqa {

struct IntRange {
  int lo = 0, hi = 0;
};

struct GenerationConfig {
  std::uint64_t seed = 0;
  int records = 50;
  IntRange s{2, 5};
  IntRange unrelated{0, 2};  // s - c
  IntRange d{1, 3};
  int max_premises = 10;
  double numeric_fraction = 0.1;
  double mc_rate = 0.8;   // non-numerical records with an MC question
  double ynu_rate = 0.9;  // ... with YNU questions
  IntRange ynu_questions{1, 2};
  NumericRanges numeric;
  int attempts_per_record = 50;
  BackendSpec backend;
  Lexicon lexicon = Lexicon::academic_policy();
};

struct RecordProvenance {
  std::uint64_t seed = 0;  // sub-seed of the accepted attempt
  int attempt = 0;
  bool numeric = false;
  PremiseParams params;  // unused for numerical records
};

struct GeneratedDataset {
  std::vector<Record> records;
  std::vector<RecordProvenance> provenance;
};

// Checks ranges and probabilities; throws InvalidParams.
void validate_config(const GenerationConfig& config);

// Record i is a pure function of (config, i): attempt k uses the sub-seed
// derive_seed(config.seed, i, k). Throws GenerationExhausted when a record
// runs out of attempts.
Record generate_record(const GenerationConfig& config, int index, SolverBackend& backend,
                       RecordProvenance* provenance = nullptr);

// Records are built on up to `jobs` threads, each with its own backend; the
// result does not depend on `jobs`.
GeneratedDataset generate_dataset(const GenerationConfig& config, int jobs = 1);

}  // namespace pqa
