#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "idemsum/json_io.hpp"
#include "idemsum/oracle.hpp"

using namespace idemsum;

namespace {

struct RunConfig {
  std::string command;
  std::string mode = "auto";
  std::string in_path;
  std::string out_path;
  std::string field_inline;
  std::string suite;
  std::uint64_t seed = 0;
  int cap = 6;
};

json read_input(const RunConfig &cfg) {
  std::string text;
  if (!cfg.in_path.empty()) {
    std::ifstream f(cfg.in_path);
    require(f.good(), Errc::MalformedInput, "cannot open input file " + cfg.in_path);
    std::stringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  } else {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    text = ss.str();
  }
  json j = json::parse(text, nullptr, false);
  require(!j.is_discarded(), Errc::MalformedInput, "input is not valid JSON");
  return j;
}

void write_output(const RunConfig &cfg, const std::string &text) {
  if (!cfg.out_path.empty()) {
    std::ofstream f(cfg.out_path);
    require(f.good(), Errc::MalformedInput, "cannot open output file " + cfg.out_path);
    f << text;
  } else {
    std::cout << text;
  }
}

// Inline field override: inputs may omit "field" when --field-inline is
// given; an explicit "field" in the document always wins.
FieldPtr resolve_field(const json &doc, const RunConfig &cfg) {
  if (doc.is_object() && doc.contains("field")) return field_from_json(doc["field"]);
  require(!cfg.field_inline.empty(), Errc::MalformedInput,
          "no field in input and no --field-inline");
  json fj = json::parse(cfg.field_inline, nullptr, false);
  require(!fj.is_discarded(), Errc::MalformedInput, "--field-inline is not valid JSON");
  return field_from_json(fj);
}

Mat matrix_arg(const json &doc, const RunConfig &cfg) {
  json j = doc;
  if (!j.contains("field")) j["field"] = field_to_json(resolve_field(doc, cfg));
  return mat_from_json(j);
}

int run_decide(const RunConfig &cfg) {
  Mat A = matrix_arg(read_input(cfg), cfg);
  bool any = is_sum_of_idempotents(A);
  json out;
  out["sum_of_idempotents"] = any;
  out["diff2"] = decide_diff2(A, IntertwineMode::corrected, cfg.seed);
  out["sum2"] = decide_sum2(A, IntertwineMode::corrected, cfg.seed);
  write_output(cfg, out.dump() + "\n");
  return any ? 0 : 1;
}

int run_decompose(const RunConfig &cfg) {
  Mat A = matrix_arg(read_input(cfg), cfg);
  DecompCert c;
  if (cfg.mode == "auto") c = decompose_best(A, cfg.seed);
  else if (cfg.mode == "sum5") c = decompose_sum5(A, cfg.seed);
  else if (cfg.mode == "small3") c = decompose_small_field3(A, cfg.seed);
  else if (cfg.mode == "char23") c = decompose_char23_4(A, cfg.seed);
  else if (cfg.mode == "prime4") c = decompose_prime4(A, cfg.seed);
  else if (cfg.mode == "cyclic") c = decompose_cyclic(A, cfg.seed);
  else fail(Errc::MalformedInput, "unknown mode " + cfg.mode);
  require(verify_cert(A, c), Errc::GadgetVerificationFailed,
          "refusing to print an unverified certificate");
  std::cerr << "decomposed " << A.rows() << "x" << A.cols() << " via " << c.pipeline
            << " into " << c.count() << " parts\n";
  write_output(cfg, cert_to_json(c).dump() + "\n");
  return 0;
}

int run_invariants(const RunConfig &cfg) {
  Mat A = matrix_arg(read_input(cfg), cfg);
  json out;
  json inv = json::array();
  for (const auto &f : invariant_factors(A)) inv.push_back(poly_to_json(f));
  out["invariant_factors"] = std::move(inv);
  out["eig_structure"] = eig_structure_to_json(eig_structure(A, cfg.seed));
  write_output(cfg, out.dump() + "\n");
  return 0;
}

int run_oracle(const RunConfig &cfg) {
  json doc = read_input(cfg);
  require(doc.is_object() && doc.contains("n"), Errc::MalformedInput,
          "oracle wants {\"n\":int[,\"field\":{...}]}");
  int n = doc["n"].get<int>();
  FieldPtr F = resolve_field(doc, cfg);
  OracleTable t = build_oracle_table(n, F, cfg.cap);
  std::map<int, std::uint64_t> hist;
  int sn = 0;
  for (std::uint64_t key = 0; key < t.min_counts.size(); ++key) {
    int c = t.min_counts[key];
    if (c < 0) continue;
    ++hist[c];
    sn = std::max(sn, c);
  }
  json out;
  out["n"] = n;
  out["field"] = field_to_json(F);
  out["empirical_sn"] = sn;
  json h;
  for (auto [count, matrices] : hist) h[std::to_string(count)] = matrices;
  out["histogram"] = std::move(h);
  write_output(cfg, out.dump() + "\n");
  return 0;
}

int run_verify(const RunConfig &cfg) {
  json doc = read_input(cfg);
  require(doc.is_object() && doc.contains("target") && doc.contains("certificate"),
          Errc::MalformedInput, "verify wants {\"target\":matrix,\"certificate\":cert}");
  Mat A = matrix_arg(doc["target"], cfg);
  DecompCert c = cert_from_json(doc["certificate"]);
  bool ok = verify_cert(A, c);
  json out;
  out["valid"] = ok;
  write_output(cfg, out.dump() + "\n");
  return ok ? 0 : 1;
}

int run_bounds(const RunConfig &cfg) {
  json doc = read_input(cfg);
  require(doc.is_object() && doc.contains("n"), Errc::MalformedInput,
          "bounds wants {\"n\":int[,\"field\":{...}]}");
  SnBounds b = sn_bounds(doc["n"].get<int>(), resolve_field(doc, cfg));
  write_output(cfg, sn_bounds_to_json(b).dump() + "\n");
  return 0;
}

// Suite ids: mN_fQ/diff2 or mN_fQ/sum2, e.g. m2_f3/diff2. One JSON line per
// matrix where the literal and corrected intertwining readings disagree,
// with the exhaustive-enumeration truth attached.
int run_discrepancies(const RunConfig &cfg) {
  require(!cfg.suite.empty(), Errc::UnknownSuite, "empty suite id");
  int n = 0;
  std::uint32_t q = 0;
  char kind[8] = {0};
  if (std::sscanf(cfg.suite.c_str(), "m%d_f%u/%5s", &n, &q, kind) != 3)
    fail(Errc::UnknownSuite, "suite id must look like m2_f3/diff2");
  std::string k(kind);
  require(k == "diff2" || k == "sum2", Errc::UnknownSuite,
          "suite decision must be diff2 or sum2");
  std::uint32_t p = q;
  std::uint32_t deg = 1;
  for (std::uint32_t c = 2; c * c <= q; ++c)
    if (q % c == 0) {
      p = c;
      deg = 0;
      for (std::uint32_t t = 1; t <= q; t *= p) ++deg;
      --deg;
      break;
    }
  FieldPtr F = FieldCtx::make(p, deg);
  std::vector<int> signs = (k == "diff2") ? std::vector<int>{1, -1}
                                          : std::vector<int>{1, 1};
  auto truth = composite_set(signs, n, F);
  std::uint64_t total = 1;
  for (int i = 0; i < n * n; ++i) total *= F->q();
  std::ostringstream lines;
  for (std::uint64_t key = 0; key < total; ++key) {
    Mat A = detail::unpack_mat(F, n, key);
    bool lit = (k == "diff2") ? decide_diff2(A, IntertwineMode::literal, cfg.seed)
                              : decide_sum2(A, IntertwineMode::literal, cfg.seed);
    bool cor = (k == "diff2") ? decide_diff2(A, IntertwineMode::corrected, cfg.seed)
                              : decide_sum2(A, IntertwineMode::corrected, cfg.seed);
    if (lit == cor) continue;
    json line;
    line["matrix"] = mat_to_json(A);
    line["literal_decision"] = lit;
    line["corrected_decision"] = cor;
    line["oracle_truth"] = truth.count(key) == 1;
    lines << line.dump() << "\n";
  }
  write_output(cfg, lines.str());
  return 0;
}

int exit_code_for(const Error &e) {
  switch (e.code()) {
    case Errc::MalformedInput:
    case Errc::UnknownSuite:
    case Errc::ShapeMismatch:
    case Errc::DegreeMismatch:
    case Errc::NotPrime:
    case Errc::ReducibleModulus:
    case Errc::NotMonic:
      return 2;
    case Errc::TraceNotInPrimeField:
    case Errc::GadgetVerificationFailed:
    case Errc::NotCyclic:
    case Errc::NotSimilar:
      return 1;
    default:
      return 3;  // budgets, thresholds, size constraints
  }
}

}  // namespace

int main(int argc, char **argv) {
  RunConfig cfg;
  CLI::App app{"verified idempotent-sum decompositions over finite fields"};
  app.require_subcommand(1);
  auto add_common = [&](CLI::App *sub) {
    sub->add_option("--in", cfg.in_path, "input JSON path (default: stdin)");
    sub->add_option("--out", cfg.out_path, "output path (default: stdout)");
    sub->add_option("--seed", cfg.seed, "deterministic seed");
    sub->add_option("--cap", cfg.cap, "oracle search depth cap");
    sub->add_option("--field-inline", cfg.field_inline,
                    "field JSON used when the input omits one");
  };
  auto *decide = app.add_subcommand("decide", "trace criterion and two-idempotent tests");
  auto *decompose = app.add_subcommand("decompose", "produce a verified certificate");
  decompose->add_option("--mode", cfg.mode,
                        "pipeline: auto|sum5|small3|char23|prime4|cyclic");
  auto *invariants = app.add_subcommand("invariants", "invariant factors and eigenstructure");
  auto *oracle = app.add_subcommand("oracle", "exhaustive minimal-count summary");
  auto *verify = app.add_subcommand("verify", "check a certificate against its target");
  auto *bounds = app.add_subcommand("bounds", "lower/upper bounds for s_n");
  auto *disc = app.add_subcommand("discrepancies",
                                  "literal-vs-corrected decision ledger");
  disc->add_option("--suite", cfg.suite, "suite id, e.g. m2_f3/diff2");
  for (auto *sub : {decide, decompose, invariants, oracle, verify, bounds, disc})
    add_common(sub);
  CLI11_PARSE(app, argc, argv);

  try {
    if (decide->parsed()) return run_decide(cfg);
    if (decompose->parsed()) return run_decompose(cfg);
    if (invariants->parsed()) return run_invariants(cfg);
    if (oracle->parsed()) return run_oracle(cfg);
    if (verify->parsed()) return run_verify(cfg);
    if (bounds->parsed()) return run_bounds(cfg);
    if (disc->parsed()) return run_discrepancies(cfg);
  } catch (const Error &e) {
    json err;
    err["error"]["code"] = errc_name(e.code());
    err["error"]["message"] = e.what();
    std::cout << err.dump() << "\n";
    std::cerr << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception &e) {
    json err;
    err["error"]["code"] = "Internal";
    err["error"]["message"] = e.what();
    std::cout << err.dump() << "\n";
    return 3;
  }
  return 2;
}
