#include "pqa/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "pqa/errors.hpp"

namespace pqa {

namespace {

void check_range(const IntRange& r, int min, const char* name) {
  if (r.lo < min || r.hi < r.lo) {
    throw InvalidParams(std::string(name) + " range [" + std::to_string(r.lo) + ", " + std::to_string(r.hi) +
                        "] is invalid");
  }
}

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidParams(std::string(name) + " must lie in [0, 1]");
}

std::vector<QuestionSpec> pick_questions(const std::vector<Formula>& premises, const std::vector<std::string>& nl,
                                         Rng& rng, const Lexicon& lexicon, SolverBackend& backend,
                                         const GenerationConfig& config) {
  std::vector<QuestionSpec> specs;
  std::vector<std::string> texts;
  auto add = [&](const GeneratedQuestion& q) {
    if (std::find(texts.begin(), texts.end(), q.text) != texts.end()) return;
    texts.push_back(q.text);
    specs.push_back(q.spec);
  };
  const bool mc = rng.chance(config.mc_rate);
  const bool ynu = rng.chance(config.ynu_rate) || !mc;
  if (mc) add(gen_mc(premises, nl, rng, lexicon, backend));
  if (ynu) {
    const int n = rng.range(config.ynu_questions.lo, config.ynu_questions.hi);
    for (int i = 0; i < n; ++i) add(gen_yesno(premises, nl, rng, lexicon, backend));
  }
  return specs;
}

}  // namespace

void validate_config(const GenerationConfig& c) {
  if (c.records < 0) throw InvalidParams("records must be non-negative");
  check_range(c.s, 1, "s");
  check_range(c.unrelated, 0, "unrelated");
  check_range(c.d, 0, "d");
  check_range(c.ynu_questions, 1, "ynu_questions");
  if (c.max_premises < c.s.lo + c.unrelated.lo + c.d.lo) {
    throw InvalidParams("max_premises " + std::to_string(c.max_premises) + " is below the smallest pool");
  }
  if (c.attempts_per_record < 1) throw InvalidParams("attempts_per_record must be positive");
  check_probability(c.numeric_fraction, "numeric_fraction");
  check_probability(c.mc_rate, "mc_rate");
  check_probability(c.ynu_rate, "ynu_rate");
}

Record generate_record(const GenerationConfig& config, int index, SolverBackend& backend,
                       RecordProvenance* provenance) {
  std::string last_error;
  for (int attempt = 0; attempt < config.attempts_per_record; ++attempt) {
    const std::uint64_t sub = derive_seed(config.seed, static_cast<std::uint64_t>(index),
                                          static_cast<std::uint64_t>(attempt));
    Rng rng(sub);
    RecordProvenance prov;
    prov.seed = sub;
    prov.attempt = attempt;
    try {
      Record record;
      if (rng.chance(config.numeric_fraction)) {
        prov.numeric = true;
        const auto item = gen_numeric(rng, config.lexicon, backend, config.numeric, rng.range(1, 3));
        std::vector<QuestionSpec> specs;
        for (const auto& q : item.questions) specs.push_back(q.spec);
        record = assemble_record(item.premises, item.premises_nl, specs, config.lexicon, backend);
      } else {
        const int s = rng.range(config.s.lo, config.s.hi);
        const int u = rng.range(config.unrelated.lo, std::max(config.unrelated.lo, std::min(config.unrelated.hi, s)));
        const int room = config.max_premises - s - u;
        if (room < config.d.lo) continue;
        const int d = rng.range(config.d.lo, std::min(config.d.hi, room));
        prov.params = {s, s - u, d};
        Lexicon lexicon = config.lexicon;
        const auto pool = generate_premises(s, s - u, d, rng.next(), backend, lexicon);
        const auto premises = ordered_premises(pool, rng.next());
        std::vector<std::string> nl;
        for (const auto& f : premises) nl.push_back(render_nl(f, lexicon));
        const auto specs = pick_questions(premises, nl, rng, lexicon, backend, config);
        record = assemble_record(premises, nl, specs, lexicon, backend);
      }
      if (provenance) *provenance = prov;
      return record;
    } catch (const GenerationExhausted& e) {
      last_error = e.what();
    } catch (const RecordRejected& e) {
      last_error = e.what();
    }
  }
  throw GenerationExhausted("record " + std::to_string(index) + " failed after " +
                            std::to_string(config.attempts_per_record) + " attempts: " + last_error);
}

GeneratedDataset generate_dataset(const GenerationConfig& config, int jobs) {
  validate_config(config);
  const int n = config.records;
  GeneratedDataset out;
  out.records.resize(static_cast<std::size_t>(n));
  out.provenance.resize(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};

  auto worker = [&] {
    const auto backend = make_backend(config.backend);
    for (int i = next++; i < n && !failed; i = next++) {
      try {
        out.records[i] = generate_record(config, i, *backend, &out.provenance[i]);
      } catch (...) {
        errors[i] = std::current_exception();
        failed = true;
      }
    }
  };
  const int threads = std::clamp(jobs, 1, std::max(1, n));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace pqa
