// Copyright 2026 The SDMM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// sdmm: run sessions, sweep sizes, and print analytical exponents as CSV.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sdmm/analysis.hpp"
#include "sdmm/errors.hpp"
#include "sdmm/gasp.hpp"
#include "sdmm/poq.hpp"
#include "sdmm/session.hpp"
#include "sdmm/sweep.hpp"
#include "sdmm/transport.hpp"

namespace {

using namespace sdmm;

constexpr int kExitUsage = 2;
constexpr int kExitConstruction = 3;
constexpr int kExitRuntime = 1;

// Stdout unless --out names a file.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw UsageError("cannot open output file '" + path + "'");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open input file '" + path + "'");
  return in;
}

std::uint64_t parse_modulus(const std::string& text) {
  if (text == "auto") return 0;
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != text.size()) throw UsageError("--modulus must be 'auto' or an integer");
  return v;
}

struct RunArgs {
  std::string protocol = "gasp";
  std::size_t K = 1, L = 1, T = 1;
  std::size_t n = 0, r = 0, s = 0, t = 0;
  std::string modulus = "auto";
  std::string algorithm = "standard";
  std::size_t cutoff = 64;
  std::optional<std::uint64_t> seed;
  std::string transport = "inproc";
  std::vector<std::string> connect;
  std::string a_path, b_path, code_path, write_code_path, product_path, out;
  bool allow_small_field = false;
  bool timing = false;
  bool per_server = false;
};

int cmd_run(const RunArgs& args) {
  SessionConfig cfg;
  cfg.protocol = parse_protocol(args.protocol);
  const std::size_t r = args.r ? args.r : args.n;
  const std::size_t s = args.s ? args.s : args.n;
  const std::size_t t = args.t ? args.t : args.n;
  cfg.params = {args.K, args.L, args.T, r, s, t};
  cfg.modulus = parse_modulus(args.modulus);
  cfg.algorithm = parse_server_algorithm(args.algorithm);
  cfg.strassen_cutoff = args.cutoff;
  cfg.seed = args.seed;
  cfg.transport = parse_transport(args.transport);
  for (const auto& c : args.connect) cfg.connect.push_back(Endpoint::parse(c));
  cfg.code_options.allow_small_field = args.allow_small_field;

  if (!args.code_path.empty()) {
    auto in = open_input(args.code_path);
    cfg.code = std::make_shared<const GaspCode>(read_code_descriptor(in, cfg.code_options));
    cfg.params = cfg.code->params();
    cfg.modulus = cfg.code->modulus();
  }

  std::optional<MatrixF> a, b;
  if (!args.a_path.empty()) {
    auto in = open_input(args.a_path);
    a = read_matrix(in);
  }
  if (!args.b_path.empty()) {
    auto in = open_input(args.b_path);
    b = read_matrix(in);
  }
  if (a.has_value() != b.has_value()) throw UsageError("--a and --b must be given together");
  if (a) {
    cfg.params.r = a->rows();
    cfg.params.s = a->cols();
    cfg.params.t = b->cols();
    if (cfg.modulus == 0 && !cfg.code) {
      cfg.modulus = a->modulus();
    } else if (cfg.modulus != a->modulus()) {
      throw UsageError("--modulus disagrees with the input matrices");
    }
  }
  cfg.validate();

  if (cfg.protocol == Protocol::gasp && !cfg.code) cfg.code = resolve_code(cfg);
  if (cfg.protocol == Protocol::gasp && a && a->modulus() != cfg.code->modulus())
    throw UsageError("input matrices are over F_" + std::to_string(a->modulus()) + " but the code uses F_" +
                     std::to_string(cfg.code->modulus()));
  if (cfg.code) cfg.modulus = cfg.code->modulus();
  if (!a) std::tie(a, b) = random_inputs(cfg);

  const auto result = run_session(cfg, *a, *b);

  if (!args.write_code_path.empty() && result.code) {
    std::ofstream out(args.write_code_path);
    if (!out) throw UsageError("cannot open '" + args.write_code_path + "'");
    write_code_descriptor(out, *result.code);
  }
  if (!args.product_path.empty()) {
    std::ofstream out(args.product_path);
    if (!out) throw UsageError("cannot open '" + args.product_path + "'");
    write_matrix(out, result.product);
  }
  Output out(args.out);
  out.stream() << kCsvHeader << '\n';
  write_csv_rows(out.stream(), result.report, cfg.params.r, {args.timing, args.per_server});
  return 0;
}

int cmd_serve(const std::string& listen, std::size_t sessions) {
  SocketListener listener(Endpoint::parse(listen));
  std::cerr << "listening on " << Endpoint{Endpoint::parse(listen).host, listener.port()}.str() << '\n';
  for (std::size_t served = 0; sessions == 0 || served < sessions; ++served) {
    auto channel = listener.accept();
    try {
      serve_one_session(*channel);
    } catch (const std::exception& e) {
      std::cerr << "session failed: " << e.what() << '\n';
    }
  }
  return 0;
}

struct SweepArgs {
  std::vector<std::size_t> n_values;
  double epsilon = 0.0;
  std::optional<std::size_t> K;
  std::string algorithm = "standard";
  std::size_t cutoff = 64;
  std::size_t T = 1;
  std::size_t repetitions = 1;
  std::uint64_t seed = 1;
  bool parallel = false;
  bool timing = false;
  std::string out, fits;
};

int cmd_sweep(const SweepArgs& args) {
  SweepSpec spec;
  spec.n_values = args.n_values;
  spec.epsilon = args.epsilon;
  spec.fixed_k = args.K;
  spec.algorithm = parse_server_algorithm(args.algorithm);
  spec.strassen_cutoff = args.cutoff;
  spec.T = args.T;
  spec.repetitions = args.repetitions;
  spec.seed = args.seed;
  spec.parallel = args.parallel;
  const auto result = sweep(spec);

  Output out(args.out);
  write_sweep_csv(out.stream(), result, {args.timing, false});
  if (args.fits.empty()) {
    write_fit_csv(std::cerr, result);
  } else {
    Output fits(args.fits);
    write_fit_csv(fits.stream(), result);
  }
  for (const auto& row : result.rows) {
    if (row.failed) std::cerr << "n=" << row.n << " failed: " << row.error << '\n';
    else if (!args.K && std::abs(std::pow(double(row.n), args.epsilon) - double(row.K)) > 1e-9)
      std::cerr << "n=" << row.n << ": n^eps = " << std::pow(double(row.n), args.epsilon) << " realized as K = " << row.K
                << '\n';
  }
  return 0;
}

int cmd_optimize(const std::vector<double>& omegas, const std::string& path) {
  Output out(path);
  auto& os = out.stream();
  os.precision(12);
  os << "omega,epsilon_star,total_exponent\n";
  for (double w : omegas) {
    const auto o = analysis::optimize_epsilon(w);
    os << w << ',' << o.epsilon << ',' << o.total << '\n';
  }
  return 0;
}

int cmd_fieldsize(std::size_t K, std::size_t L, std::size_t T, const std::string& path) {
  Output out(path);
  analysis::write_field_size_csv(out.stream(), analysis::field_size_report(K, L, T));
  return 0;
}

void print_elems(std::ostream& os, std::span<const std::uint64_t> v) {
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
}

// Two-server retrieval of one precomputed product, every message printed.
int cmd_poq_demo(std::uint64_t q, std::size_t r, std::size_t s, std::size_t t, std::optional<std::uint64_t> index,
                 std::uint64_t seed, const std::string& path) {
  PrimeField field(q);
  const auto db = poq::build_database(field, r, s, t);
  const std::uint64_t target = index.value_or(db.file_count() - 1);
  if (target >= db.file_count()) throw UsageError("--index must be below M = " + std::to_string(db.file_count()));
  const auto [a, b] = poq::pair_at(target, db.shape());
  SeededRandomSource rng(derive_seed(seed, 4));
  const auto query = poq::pir_query(target, db.file_count(), db.file_len(), field, rng);
  const auto resp1 = poq::pir_respond(db, query.server1, field);
  const auto resp2 = poq::pir_respond(db, query.server2, field);
  const auto product = poq::pir_decode(resp1, resp2, r, t, field);

  Output out(path);
  auto& os = out.stream();
  os << "item,index,values\n";
  for (std::uint64_t i = 0; i < db.file_count(); ++i) {
    os << "file," << i << ',';
    print_elems(os, db.file(i));
    os << '\n';
  }
  os << "A," << target << ',';
  print_elems(os, a.data());
  os << "\nB," << target << ',';
  print_elems(os, b.data());
  os << "\nquery,1,";
  print_elems(os, query.server1);
  os << "\nquery,2,";
  print_elems(os, query.server2);
  os << "\nresponse,1,";
  print_elems(os, resp1);
  os << "\nresponse,2,";
  print_elems(os, resp2);
  os << "\nproduct," << target << ',';
  print_elems(os, product.data());
  os << "\nupload_symbols,," << query.server1.size() + query.server2.size();
  os << "\ndownload_symbols,," << resp1.size() + resp2.size();
  os << "\ndownload_rate,," << poq::download_rate(2, 1) << '\n';
  return 0;
}

int cmd_poq_dump(std::uint64_t q, std::size_t r, std::size_t s, std::size_t t, std::uint64_t cap,
                 const std::string& path) {
  PrimeField field(q);
  Output out(path);
  poq::write_database(out.stream(), poq::build_database(field, r, s, t, cap));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure distributed matrix multiplication: sessions, sweeps, and exponent analysis"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run one user/N-server session and print its cost rows");
  run_cmd->add_option("--protocol", run.protocol, "gasp or poq")->capture_default_str();
  run_cmd->add_option("-K", run.K, "row partitions of A")->capture_default_str();
  run_cmd->add_option("-L", run.L, "column partitions of B")->capture_default_str();
  run_cmd->add_option("-T", run.T, "colluding servers tolerated")->capture_default_str();
  run_cmd->add_option("-n", run.n, "sets r = s = t");
  run_cmd->add_option("-r", run.r, "rows of A");
  run_cmd->add_option("-s", run.s, "inner dimension");
  run_cmd->add_option("-t", run.t, "columns of B");
  run_cmd->add_option("--modulus", run.modulus, "prime modulus or 'auto'")->capture_default_str();
  run_cmd->add_option("--algorithm", run.algorithm, "standard or strassen-block")->capture_default_str();
  run_cmd->add_option("--cutoff", run.cutoff, "Strassen recursion cutoff")->capture_default_str();
  run_cmd->add_option("--seed", run.seed, "session seed")->required();
  run_cmd->add_option("--transport", run.transport, "inproc or socket")->capture_default_str();
  run_cmd->add_option("--connect", run.connect, "server endpoint host:port, once per server");
  run_cmd->add_option("--a", run.a_path, "matrix file for A");
  run_cmd->add_option("--b", run.b_path, "matrix file for B");
  run_cmd->add_option("--code", run.code_path, "use a saved code descriptor");
  run_cmd->add_option("--write-code", run.write_code_path, "save the code descriptor");
  run_cmd->add_option("--product", run.product_path, "write the decoded product");
  run_cmd->add_flag("--allow-small-field", run.allow_small_field,
                    "accept a modulus below the field-size bound if points verify");
  run_cmd->add_flag("--timing", run.timing, "write measured wall_ns");
  run_cmd->add_flag("--per-server", run.per_server, "one extra row per server");
  run_cmd->add_option("--out", run.out, "output CSV file");

  std::string listen;
  std::size_t sessions = 0;
  auto* serve_cmd = app.add_subcommand("serve", "Act as one server for socket sessions");
  serve_cmd->add_option("--listen", listen, "host:port to bind")->required();
  serve_cmd->add_option("--sessions", sessions, "exit after this many sessions (0 = never)")->capture_default_str();

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Measure counts over n and fit log-log slopes");
  sweep_cmd->add_option("-n,--n", sw.n_values, "sizes, strictly increasing")->delimiter(',')->required();
  sweep_cmd->add_option("--epsilon", sw.epsilon, "K = L = round(n^epsilon)")->capture_default_str();
  sweep_cmd->add_option("-K", sw.K, "fix K = L instead of deriving it from epsilon");
  sweep_cmd->add_option("--algorithm", sw.algorithm, "standard or strassen-block")->capture_default_str();
  sweep_cmd->add_option("--cutoff", sw.cutoff, "Strassen recursion cutoff")->capture_default_str();
  sweep_cmd->add_option("-T", sw.T, "colluding servers tolerated")->capture_default_str();
  sweep_cmd->add_option("--repetitions", sw.repetitions, "sessions per n")->capture_default_str();
  sweep_cmd->add_option("--seed", sw.seed, "sweep seed")->capture_default_str();
  sweep_cmd->add_flag("--parallel", sw.parallel, "run n points concurrently");
  sweep_cmd->add_flag("--timing", sw.timing, "write measured wall_ns");
  sweep_cmd->add_option("--out", sw.out, "output CSV file");
  sweep_cmd->add_option("--fits", sw.fits, "slope fit CSV (default: stderr)");

  std::vector<double> omegas{3.0};
  std::string opt_out;
  auto* opt_cmd = app.add_subcommand("optimize", "Best epsilon and total exponent per omega");
  opt_cmd->add_option("--omega", omegas, "matrix multiplication exponents")->delimiter(',');
  opt_cmd->add_option("--out", opt_out, "output CSV file");

  std::vector<double> tr_omegas{2.0, analysis::kOmegaStrassen, 3.0};
  std::size_t tr_points = 101;
  std::string tr_out;
  auto* tr_cmd = app.add_subcommand("tradeoff", "User/server exponent curves (A) and optimum curve (B)");
  tr_cmd->add_option("--omega", tr_omegas, "omega values")->delimiter(',');
  tr_cmd->add_option("--points", tr_points, "epsilon grid size")->capture_default_str();
  tr_cmd->add_option("--out", tr_out, "output CSV file");

  std::size_t fK = 1, fL = 1, fT = 1;
  std::string fs_out;
  auto* fs_cmd = app.add_subcommand("fieldsize", "Sufficient field size and chosen prime");
  fs_cmd->add_option("-K", fK)->capture_default_str();
  fs_cmd->add_option("-L", fL)->capture_default_str();
  fs_cmd->add_option("-T", fT)->capture_default_str();
  fs_cmd->add_option("--out", fs_out, "output CSV file");

  auto* poq_cmd = app.add_subcommand("poq", "Private oracle querying");
  poq_cmd->require_subcommand(1);
  std::uint64_t pq = 2, pseed = 1, pcap = poq::kDefaultElementCap;
  std::size_t pr = 1, ps = 1, pt = 1;
  std::optional<std::uint64_t> pindex;
  std::string p_out;
  auto add_shape = [&](CLI::App* c) {
    c->add_option("-q", pq, "field size")->capture_default_str();
    c->add_option("-r", pr)->capture_default_str();
    c->add_option("-s", ps)->capture_default_str();
    c->add_option("-t", pt)->capture_default_str();
    c->add_option("--out", p_out, "output file");
  };
  auto* demo_cmd = poq_cmd->add_subcommand("demo", "Print a full retrieval transcript");
  add_shape(demo_cmd);
  demo_cmd->add_option("--index", pindex, "file to retrieve (default: last)");
  demo_cmd->add_option("--seed", pseed, "query mask seed")->capture_default_str();
  auto* dump_cmd = poq_cmd->add_subcommand("dump", "Write the product database");
  add_shape(dump_cmd);
  dump_cmd->add_option("--cap", pcap, "maximum database elements")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*serve_cmd) return cmd_serve(listen, sessions);
    if (*sweep_cmd) return cmd_sweep(sw);
    if (*opt_cmd) return cmd_optimize(omegas, opt_out);
    if (*tr_cmd) {
      Output out(tr_out);
      analysis::emit_tradeoff_curves(out.stream(), tr_omegas, tr_points);
      return 0;
    }
    if (*fs_cmd) return cmd_fieldsize(fK, fL, fT, fs_out);
    if (*demo_cmd) return cmd_poq_demo(pq, pr, ps, pt, pindex, pseed, p_out);
    if (*dump_cmd) return cmd_poq_dump(pq, pr, ps, pt, pcap, p_out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConstructionError& e) {
    std::cerr << "construction failed: " << e.what() << '\n';
    return kExitConstruction;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
