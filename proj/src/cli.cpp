#include "pqa/cli.hpp"

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "pqa/errors.hpp"
#include "pqa/fol.hpp"
#include "pqa/harness.hpp"
#include "pqa/qa_gen.hpp"
#include "pqa/scoring.hpp"

namespace pqa {

namespace fs = std::filesystem;
using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

namespace {

IntRange range_of(const json& j, const char* key) {
  try {
    if (j.is_number_integer()) return {j.get<int>(), j.get<int>()};
    if (j.is_array() && j.size() == 2) return {j[0].get<int>(), j[1].get<int>()};
  } catch (const json::exception&) {
  }
  throw ConfigError(std::string("\"") + key + "\" must be an integer or a [lo, hi] pair");
}

json range_json(const IntRange& r) { return json::array({r.lo, r.hi}); }

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

ordered_json config_json(const GenerationConfig& c) {
  ordered_json j;
  j["seed"] = c.seed;
  j["records"] = c.records;
  j["s"] = range_json(c.s);
  j["unrelated"] = range_json(c.unrelated);
  j["d"] = range_json(c.d);
  j["max_premises"] = c.max_premises;
  j["numeric_fraction"] = c.numeric_fraction;
  j["mc_rate"] = c.mc_rate;
  j["ynu_rate"] = c.ynu_rate;
  j["ynu_questions"] = range_json(c.ynu_questions);
  ordered_json n;
  n["terms"] = json::array({c.numeric.min_terms, c.numeric.max_terms});
  n["credits"] = json::array({c.numeric.min_credits, c.numeric.max_credits});
  n["required"] = json::array({c.numeric.min_required, c.numeric.max_required});
  n["cap"] = json::array({c.numeric.min_cap, c.numeric.max_cap});
  n["max_noise"] = c.numeric.max_noise;
  j["numeric"] = n;
  j["attempts_per_record"] = c.attempts_per_record;
  j["backend"] = c.backend.to_string();
  return j;
}

}  // namespace

GenerationConfig load_generation_config(std::string_view json_text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  GenerationConfig c;
  try {
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("records")) c.records = j.at("records").get<int>();
    if (j.contains("s")) c.s = range_of(j.at("s"), "s");
    if (j.contains("unrelated")) c.unrelated = range_of(j.at("unrelated"), "unrelated");
    if (j.contains("c")) {
      if (c.s.lo != c.s.hi) throw ConfigError("\"c\" needs a fixed \"s\"");
      const int cc = j.at("c").get<int>();
      c.unrelated = {c.s.lo - cc, c.s.lo - cc};
    }
    if (j.contains("d")) c.d = range_of(j.at("d"), "d");
    c.max_premises = j.value("max_premises", c.max_premises);
    c.numeric_fraction = j.value("numeric_fraction", c.numeric_fraction);
    c.mc_rate = j.value("mc_rate", c.mc_rate);
    c.ynu_rate = j.value("ynu_rate", c.ynu_rate);
    if (j.contains("ynu_questions")) c.ynu_questions = range_of(j.at("ynu_questions"), "ynu_questions");
    if (j.contains("numeric")) {
      const auto& n = j.at("numeric");
      if (n.contains("terms")) {
        const auto r = range_of(n.at("terms"), "numeric.terms");
        c.numeric.min_terms = r.lo;
        c.numeric.max_terms = r.hi;
      }
      if (n.contains("credits")) {
        const auto r = range_of(n.at("credits"), "numeric.credits");
        c.numeric.min_credits = r.lo;
        c.numeric.max_credits = r.hi;
      }
      if (n.contains("required")) {
        const auto r = range_of(n.at("required"), "numeric.required");
        c.numeric.min_required = r.lo;
        c.numeric.max_required = r.hi;
      }
      if (n.contains("cap")) {
        const auto r = range_of(n.at("cap"), "numeric.cap");
        c.numeric.min_cap = r.lo;
        c.numeric.max_cap = r.hi;
      }
      c.numeric.max_noise = n.value("max_noise", c.numeric.max_noise);
    }
    c.attempts_per_record = j.value("attempts_per_record", c.attempts_per_record);
    if (j.contains("backend")) c.backend = BackendSpec::parse(j.at("backend").get<std::string>());
    if (j.contains("lexicon")) {
      fs::path p = j.at("lexicon").get<std::string>();
      if (p.is_relative()) p = fs::path(base_dir) / p;
      if (!fs::exists(p)) throw ConfigError("lexicon file '" + p.string() + "' does not exist");
      c.lexicon = Lexicon::from_json(read_file(p.string()));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return c;
}

std::string generation_manifest(const GenerationConfig& config, const GeneratedDataset& ds,
                                const std::string& dataset_text) {
  ordered_json m;
  m["tool"] = "pqa";
  m["version"] = PQA_VERSION;
  m["seed"] = config.seed;
  m["params"] = config_json(config);
  m["lexicon_sha256"] = sha256_hex(config.lexicon.to_json());
  m["dataset_sha256"] = sha256_hex(dataset_text);
  ordered_json records = ordered_json::array();
  for (std::size_t i = 0; i < ds.provenance.size(); ++i) {
    const auto& p = ds.provenance[i];
    ordered_json r;
    r["index"] = i + 1;
    r["seed"] = hex64(p.seed);
    r["attempt"] = p.attempt;
    r["kind"] = p.numeric ? "numerical" : "logic";
    if (!p.numeric) {
      r["s"] = p.params.s;
      r["c"] = p.params.c;
      r["d"] = p.params.d;
    }
    records.push_back(r);
  }
  m["records"] = records;
  return m.dump(2) + "\n";
}

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string backend;
  std::string out;
};

struct Context {
  Globals g;
  std::ostream& out;
  std::ostream& err;

  GenerationConfig config() const {
    GenerationConfig c;
    if (!g.config.empty()) {
      if (!fs::exists(g.config)) throw ConfigError("config file '" + g.config + "' does not exist");
      c = load_generation_config(read_file(g.config), fs::path(g.config).parent_path().string());
    }
    if (g.seed) c.seed = *g.seed;
    if (!g.backend.empty()) c.backend = BackendSpec::parse(g.backend);
    return c;
  }

  bool has_seed() const {
    if (g.seed) return true;
    if (g.config.empty()) return false;
    const auto j = json::parse(read_file(g.config), nullptr, false);
    return j.is_object() && j.contains("seed");
  }
};

std::string manifest_path_for(const std::string& dataset_path) {
  fs::path p(dataset_path);
  return (p.parent_path() / (p.stem().string() + ".manifest.json")).string();
}

int cmd_generate(Context& ctx, std::optional<int> records, std::string manifest_path) {
  if (!ctx.has_seed()) throw ConfigError("generate needs a seed (--seed or \"seed\" in the config)");
  auto config = ctx.config();
  if (records) config.records = *records;
  const std::string out_path = ctx.g.out.empty() ? "dataset.json" : ctx.g.out;
  if (manifest_path.empty()) manifest_path = manifest_path_for(out_path);
  GeneratedDataset ds;
  try {
    ds = generate_dataset(config, ctx.g.jobs);
  } catch (const GenerationExhausted&) {
    std::error_code ec;
    fs::remove(out_path, ec);
    fs::remove(manifest_path, ec);
    throw;
  }
  const std::string text = write_dataset(ds.records);
  write_file(out_path, text);
  write_file(manifest_path, generation_manifest(config, ds, text));
  ctx.out << "wrote " << ds.records.size() << " records to " << out_path << "\n"
          << "manifest " << manifest_path << "\n";
  return kExitOk;
}

std::vector<Record> load_dataset(const std::string& path) {
  if (!fs::exists(path)) throw ConfigError("dataset '" + path + "' does not exist");
  return read_dataset(read_file(path));
}

int cmd_validate(Context& ctx, const std::string& path) {
  const auto config = ctx.config();
  const auto records = load_dataset(path);
  std::vector<ValidationReport> reports(records.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    try {
      const auto backend = make_backend(config.backend);
      for (std::size_t i = next++; i < records.size(); i = next++) {
        std::vector<Formula> premises;
        for (const auto& s : records[i].premises_fol) {
          try {
            premises.push_back(parse_formula(s));
          } catch (const Error&) {
          }
        }
        reports[i] = check_record(records[i], lexicon_for(config.lexicon, premises), *backend);
      }
    } catch (...) {
      std::lock_guard lock(mu);
      if (!failure) failure = std::current_exception();
      next = records.size();
    }
  };
  std::vector<std::thread> threads;
  const int n = std::max(1, std::min<int>(ctx.g.jobs, static_cast<int>(records.size())));
  for (int t = 0; t < n; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
  std::size_t violations = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    for (const auto& v : reports[i].violations) {
      ctx.out << "record " << i + 1 << ": " << v.to_string() << "\n";
      ++violations;
    }
  }
  ctx.out << records.size() << " records, " << violations << " violations\n";
  return violations ? kExitViolations : kExitOk;
}

int cmd_stats(Context& ctx, const std::string& path) {
  ctx.out << format_stats(dataset_stats(load_dataset(path)));
  return kExitOk;
}

int cmd_score(Context& ctx, const std::string& results_path, const std::string& truth_path,
              const std::string& round_text, const std::string& inputs_path, const std::vector<std::string>& ledgers,
              int final_n) {
  const Round round = parse_round(round_text);
  if (!fs::exists(results_path)) throw ConfigError("results file '" + results_path + "' does not exist");
  const auto results = read_results(read_file(results_path));
  const auto truth = truth_table(load_dataset(truth_path));
  std::map<std::string, TeamInputs> inputs;
  if (!inputs_path.empty()) {
    if (!fs::exists(inputs_path)) throw ConfigError("inputs file '" + inputs_path + "' does not exist");
    inputs = read_team_inputs(read_file(inputs_path));
  }
  for (const auto& spec : ledgers) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw ConfigError("--ledger expects TEAM=PATH, got '" + spec + "'");
    const std::string team = spec.substr(0, eq), path = spec.substr(eq + 1);
    if (!fs::exists(path)) throw ConfigError("ledger '" + path + "' does not exist");
    inputs[team].disqualified = read_ledger(read_file(path)).disqualified();
  }
  if (final_n < 1) throw ConfigError("--final-n must be positive");
  const auto report = score_results(results, truth, round, inputs, static_cast<std::size_t>(final_n));
  if (!ctx.g.out.empty()) write_file(ctx.g.out, report_json(report));
  ctx.out << report_table(report);
  return kExitOk;
}

int cmd_serve(Context& ctx, const std::string& dataset_path, const std::string& host, int port,
              const std::string& path) {
  const auto config = ctx.config();
  std::vector<Record> dataset;
  if (!dataset_path.empty()) dataset = load_dataset(dataset_path);
  // Block the stop signals before any server thread exists so that only
  // sigwait below receives them.
  sigset_t stop;
  sigemptyset(&stop);
  sigaddset(&stop, SIGINT);
  sigaddset(&stop, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop, nullptr);
  ReferenceServer server(std::make_shared<ReferenceSolver>(dataset, config.lexicon, config.backend), path);
  const int bound = server.start(host, port);
  ctx.out << "listening on http://" << host << ":" << bound << path << std::endl;
  int sig = 0;
  sigwait(&stop, &sig);
  server.stop();
  ctx.out << "stopped\n";
  return kExitOk;
}

struct EvaluateOptions {
  std::string url;
  std::string testset;
  std::string team = "team";
  int phase = 1;
  std::string round = "selection";
  int rate = 10;
  double timeout = 60;
  std::string path = "/query";
  std::string auth_header;
  std::string ledger;
};

int cmd_evaluate(Context& ctx, const EvaluateOptions& o) {
  EndpointConfig cfg;
  cfg.base_url = o.url;
  cfg.path = o.path;
  cfg.rate = o.rate;
  cfg.timeout_s = o.timeout;
  cfg.auth_header = o.auth_header;
  cfg.validate();
  const Round round = parse_round(o.round);
  const auto items = test_items(load_dataset(o.testset));
  std::ofstream ledger_file;
  if (!o.ledger.empty()) {
    ledger_file.open(o.ledger, std::ios::app);
    if (!ledger_file) throw ConfigError("cannot open ledger '" + o.ledger + "'");
  }
  const auto ev = evaluate_endpoint(cfg, items, round, o.team, o.phase, o.ledger.empty() ? nullptr : &ledger_file);
  if (!ctx.g.out.empty()) write_file(ctx.g.out, write_results(ev.results));
  std::map<Outcome, int> counts;
  for (const auto& e : ev.ledger.entries) ++counts[e.outcome];
  char line[160];
  std::snprintf(line, sizeof line, "%zu questions: %d ok, %d timeout, %d http-error, %d malformed\n", items.size(),
                counts[Outcome::Ok], counts[Outcome::Timeout], counts[Outcome::HttpError], counts[Outcome::Malformed]);
  ctx.out << line;
  std::snprintf(line, sizeof line, "failure fraction %.4f, longest offline span %.1f s\n",
                ev.ledger.failure_fraction(), ev.ledger.offline_span_s());
  ctx.out << line;
  std::snprintf(line, sizeof line, "phase score %.2f\n", ev.phase_score);
  ctx.out << line;
  if (ev.ledger.unreachable()) ctx.out << "endpoint unreachable\n";
  if (ev.disqualified) {
    ctx.out << "DISQUALIFIED\n";
    return kExitDisqualified;
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Premise/question dataset generation and QA evaluation", "pqa"};
  app.require_subcommand(1);
  Context ctx{{}, out, err};
  std::uint64_t seed = 0;
  app.add_option("--config", ctx.g.config, "JSON config file");
  auto* seed_opt = app.add_option("--seed", seed, "master seed");
  app.add_option("--jobs", ctx.g.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--backend", ctx.g.backend, "internal | internal:<max predicates> | external:<command>");
  app.add_option("--out", ctx.g.out, "output path");

  std::optional<int> records;
  std::string manifest;
  auto* gen = app.add_subcommand("generate", "generate a dataset and its manifest");
  gen->add_option("--records", records, "number of records");
  gen->add_option("--manifest", manifest, "manifest path (default <out>.manifest.json)");

  std::string dataset;
  auto* val = app.add_subcommand("validate", "re-derive every answer, idx and citation");
  val->add_option("dataset", dataset)->required();
  auto* st = app.add_subcommand("stats", "dataset statistics");
  st->add_option("dataset", dataset)->required();

  std::string results, truth, round = "selection", inputs;
  std::vector<std::string> ledgers;
  int final_n = 5;
  auto* sc = app.add_subcommand("score", "score a results file");
  sc->add_option("--results", results)->required();
  sc->add_option("--truth", truth, "dataset with the ground truth")->required();
  sc->add_option("--round", round)->check(CLI::IsMember({"selection", "final"}));
  sc->add_option("--inputs", inputs, "bonuses and rubric means (JSON)");
  sc->add_option("--ledger", ledgers, "TEAM=PATH availability ledger");
  sc->add_option("--final-n", final_n, "final-round instances per team");

  std::string host = "127.0.0.1", path = "/query";
  int port = 8080;
  auto* sv = app.add_subcommand("serve", "run the reference solver over HTTP");
  sv->add_option("dataset", dataset, "dataset whose NL/FOL pairs the solver may use");
  sv->add_option("--host", host);
  sv->add_option("--port", port);
  sv->add_option("--path", path);

  EvaluateOptions eo;
  auto* ev = app.add_subcommand("evaluate", "query an endpoint with a test set");
  ev->add_option("--url", eo.url, "endpoint base URL, e.g. http://127.0.0.1:8080")->required();
  ev->add_option("--testset", eo.testset)->required();
  ev->add_option("--team", eo.team);
  ev->add_option("--phase", eo.phase)->check(CLI::Range(1, 2));
  ev->add_option("--round", eo.round)->check(CLI::IsMember({"selection", "final"}));
  ev->add_option("--rate", eo.rate);
  ev->add_option("--timeout", eo.timeout);
  ev->add_option("--path", eo.path);
  ev->add_option("--auth-header", eo.auth_header);
  ev->add_option("--ledger", eo.ledger, "append outcomes to this JSON-lines file");

  for (auto* sub : {gen, val, st, sc, sv, ev}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "pqa: " << e.what() << "\n";
    return kExitUsage;
  }
  if (*seed_opt) ctx.g.seed = seed;

  try {
    if (*gen) return cmd_generate(ctx, records, manifest);
    if (*val) return cmd_validate(ctx, dataset);
    if (*st) return cmd_stats(ctx, dataset);
    if (*sc) return cmd_score(ctx, results, truth, round, inputs, ledgers, final_n);
    if (*sv) return cmd_serve(ctx, dataset, host, port, path);
    if (*ev) return cmd_evaluate(ctx, eo);
  } catch (const GenerationExhausted& e) {
    err << "pqa: generation failed: " << e.what() << "\n";
    return kExitGeneration;
  } catch (const Error& e) {
    err << "pqa: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitUsage;
}

}  // namespace pqa
