#include "boxlb/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "boxlb/bounds.hpp"

namespace boxlb::cli {
namespace {

constexpr int kMaxTableD = 64;

Params make_params(const RunConfig& c) {
  return Params::make(c.d, c.r, c.s, Field::make(c.p, c.k));
}

void describe_params(const Params& params, std::ostream& err) {
  err << "d=" << params.d() << " r=" << params.r() << " s=" << params.s() << " over "
      << params.field().describe() << ", n = " << params.n()
      << ", target exponent d - r/s = " << params.target_exponent().str() << '\n';
  if (!params.theorem_regime()) {
    err << "warning: d(s-1) < (2^d-1)r fails; deletion is not expected to be negligible\n";
  }
}

// Runs `body` and maps the library's exceptions onto exit codes.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kBudget;
  } catch (const VerificationError& e) {
    err << "verification failed: " << e.what() << '\n';
    return kVerification;
  } catch (const std::logic_error& e) {
    err << "invalid input: " << e.what() << '\n';
    return kUsage;
  }
}

Record instance_record(const Params& params, const Instance& inst) {
  const double reference =
      params.leading_constant() *
      std::pow(static_cast<double>(params.n()), to_double(params.target_exponent()));
  Record rec("boxlb.instance.v1");
  rec.integer("edges", inst.edges.size())
      .integer("boxes", inst.boxes.size())
      .integer("lines", inst.lines.size())
      .integer("bad", inst.bad.size())
      .integer("kept", inst.kept.size())
      .flag("box_free", true)
      .flag("direct_checked", inst.direct_checked)
      .text("target_edges", exact_string(params.target_edges()))
      .number("reference_edges", reference)
      .number("kept_over_reference", reference > 0 ? inst.kept.size() / reference : 0.0);
  return rec;
}

Record form_record(const MultilinearForm& form) {
  std::string modulus, dims, coeffs;
  for (std::size_t i = 0; i < form.field().modulus().size(); ++i) {
    modulus += (i ? "," : "") + std::to_string(form.field().modulus()[i]);
  }
  for (std::size_t i = 0; i < form.dims().size(); ++i) {
    dims += (i ? "," : "") + std::to_string(form.dims()[i]);
  }
  for (std::size_t i = 0; i < form.coeffs().size(); ++i) {
    coeffs += (i ? " " : "") + std::to_string(form.coeffs()[i].value);
  }
  Record rec("boxlb.form.v1");
  rec.integer("p", form.field().characteristic())
      .integer("k", form.field().degree())
      .text("modulus", modulus)
      .integer("d", form.arity())
      .text("dims", dims)
      .text("coeffs", coeffs);
  return rec;
}

std::string edge_vertices(const Params& params, const EdgeSet& edges, std::size_t i) {
  const auto tuple = edges.tuple(i);
  std::string out;
  for (std::size_t j = 0; j < tuple.size(); ++j) {
    const std::uint64_t id = j * static_cast<std::uint64_t>(params.points()) + tuple[j];
    out += (j ? "," : "") + std::to_string(id);
  }
  return out;
}

std::map<std::string, std::string> parse_kv(const std::string& line, std::string& schema) {
  std::istringstream is(line);
  is >> schema;
  std::map<std::string, std::string> kv;
  std::string item;
  while (is >> item) {
    const auto eq = item.find('=');
    if (eq != std::string::npos) kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return kv;
}

}  // namespace

int cmd_table(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.d_min < 2 || c.d_max < c.d_min || c.d_max > kMaxTableD) {
    err << "usage: table D_MIN D_MAX with 2 <= D_MIN <= D_MAX <= " << kMaxTableD << '\n';
    return kUsage;
  }
  const auto rows = comparison_table(c.d_min, c.d_max, c.r_max);
  write_table(out, rows, c.format);
  if (c.r_max > 1) {
    for (const auto& row : rows) {
      if (row.best.r != 1) {
        err << "d=" << row.d << ": r=" << row.best.r << " beats r=1\n";
      }
    }
  }
  return kOk;
}

int cmd_construct(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.format == Format::csv) {
    err << "construct writes text or json-lines\n";
    return kUsage;
  }
  return guarded(err, [&] {
    const Params params = make_params(c);
    describe_params(params, err);
    Rng rng = Rng::stream(c.seed, 0);
    const Instance inst = run_instance(params, sample_forms(params, rng), c.budget);

    RecordWriter writer(out, c.format);
    Record header = run_record("boxlb.construct.v1", params);
    header.integer("seed", c.seed);
    writer.write(header);
    for (const auto& form : inst.forms) {
      if (c.format == Format::text) {
        write_form(out, form);
      } else {
        writer.write(form_record(form));
      }
    }
    writer.write(instance_record(params, inst));
    if (c.emit_edges) {
      for (std::size_t i = 0; i < inst.kept.size(); ++i) {
        Record rec("boxlb.edge.v1");
        rec.text("vertices", edge_vertices(params, inst.kept, i));
        writer.write(rec);
      }
    }
    err << "|E| = " << inst.edges.size() << ", |F| = " << inst.boxes.size()
        << ", |L| = " << inst.lines.size() << ", |B| = " << inst.bad.size()
        << ", |E'| = " << inst.kept.size() << "; box-free: yes"
        << (inst.direct_checked ? " (bad set cross-checked)" : "") << '\n';
    return static_cast<int>(kOk);
  });
}

int cmd_trials(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.trials == 0) {
    err << "usage: --trials must be at least 1\n";
    return kUsage;
  }
  return guarded(err, [&] {
    const Params params = make_params(c);
    describe_params(params, err);
    TrialOptions opts;
    opts.trials = c.trials;
    opts.seed = c.seed;
    opts.mode = c.mode;
    opts.delta = c.delta;
    opts.workers = c.workers;
    opts.budget = c.budget;
    const auto start = std::chrono::steady_clock::now();
    const TrialStats stats = run_trials(params, opts);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_trials(out, params, stats, c.format);

    err << stats.records.size() << (c.mode == Mode::exact ? " form tuples (exact)" : " trials")
        << " in " << std::fixed << std::setprecision(2) << secs << "s\n"
        << std::defaultfloat;
    err << "mean |E| = " << exact_string(stats.edges.mean()) << " vs "
        << exact_string(stats.expected_edges) << " (z = " << format_double(stats.edges.z_score(stats.expected_edges)) << ")\n";
    err << "mean |F| = " << exact_string(stats.boxes.mean()) << " vs "
        << exact_string(stats.expected_boxes) << " (z = " << format_double(stats.boxes.z_score(stats.expected_boxes)) << ")\n";
    err << "mean |B| = " << format_double(to_double(stats.bad.mean())) << " (E|F|/(q-1)^d = "
        << format_double(to_double(stats.bad_bound)) << "), mean|B|/mean|E| = "
        << format_double(stats.bad_fraction()) << '\n';
    err << "box-free: " << stats.box_free << "/" << stats.records.size()
        << ", |E'| >= (1-" << format_double(c.delta) << ") q^(ds-r): " << stats.meets_target << '\n';
    return static_cast<int>(kOk);
  });
}

int cmd_verify(const RunConfig& c, std::istream& dump, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    std::string line, schema;
    if (!std::getline(dump, line)) {
      err << "empty dump\n";
      return kUsage;
    }
    auto head = parse_kv(line, schema);
    if (schema != "boxlb.construct.v1") {
      err << "not a construct dump (expected text format)\n";
      return kUsage;
    }
    RunConfig cfg = c;
    Polynomial modulus;
    try {
      cfg.d = std::stoi(head.at("d"));
      cfg.r = std::stoi(head.at("r"));
      cfg.s = std::stoi(head.at("s"));
      cfg.p = static_cast<std::uint32_t>(std::stoul(head.at("p")));
      cfg.k = static_cast<std::uint32_t>(std::stoul(head.at("k")));
      std::istringstream ms(head.at("modulus"));
      std::string coef;
      while (std::getline(ms, coef, ',')) modulus.push_back(static_cast<std::uint32_t>(std::stoul(coef)));
    } catch (const std::exception&) {
      err << "malformed construct header\n";
      return kUsage;
    }
    const Params params =
        Params::make(cfg.d, cfg.r, cfg.s, Field::make(cfg.p, cfg.k, modulus));

    std::vector<MultilinearForm> forms;
    std::map<std::string, std::string> recorded;
    std::vector<std::uint64_t> edge_codes;
    bool saw_edges = false;
    while (std::getline(dump, line)) {
      if (line.rfind("boxlb.form.v1", 0) == 0) {
        std::istringstream rec(line + "\n" + [&] {
          std::string body;
          std::getline(dump, body);
          return body;
        }() + "\n");
        forms.push_back(read_form(rec));
      } else if (line.rfind("boxlb.instance.v1", 0) == 0) {
        recorded = parse_kv(line, schema);
      } else if (line.rfind("boxlb.edge.v1", 0) == 0) {
        saw_edges = true;
        auto kv = parse_kv(line, schema);
        std::istringstream vs(kv["vertices"]);
        std::string id;
        std::vector<Point> tuple;
        while (std::getline(vs, id, ',')) {
          const std::uint64_t v = std::stoull(id);
          if (v / params.points() != tuple.size()) throw VerificationError("edge vertex in wrong part");
          tuple.push_back(static_cast<Point>(v % params.points()));
        }
        edge_codes.push_back(EdgeSet(params.points(), params.d(), {}).encode(tuple));
      }
    }
    for (const auto& f : forms) {
      if (!(f.field() == params.field())) throw VerificationError("form field differs from header");
    }
    const Instance inst = run_instance(params, forms, cfg.budget);
    bool ok = true;
    auto compare = [&](const char* key, std::size_t actual) {
      auto it = recorded.find(key);
      if (it == recorded.end() || it->second != std::to_string(actual)) {
        err << "mismatch in " << key << ": dump has "
            << (it == recorded.end() ? "nothing" : it->second) << ", recomputed " << actual << '\n';
        ok = false;
      }
    };
    compare("edges", inst.edges.size());
    compare("boxes", inst.boxes.size());
    compare("lines", inst.lines.size());
    compare("bad", inst.bad.size());
    compare("kept", inst.kept.size());
    bool edges_box_free = true;
    if (saw_edges) {
      const EdgeSet dumped(params.points(), params.d(), std::move(edge_codes));
      edges_box_free = !find_box_witness(dumped).has_value();
      if (!(dumped == inst.kept)) {
        err << "dumped edge list differs from the recomputed E'\n";
        ok = false;
      }
    }
    RecordWriter writer(out, c.format);
    Record rec("boxlb.verify.v1");
    rec.flag("counts_match", ok).flag("box_free", edges_box_free).flag("edges_checked", saw_edges);
    writer.write(rec);
    if (!ok || !edges_box_free) return kVerification;
    err << "dump verified: counts match, E' is box-free\n";
    return kOk;
  });
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random multilinear constructions for the Erdos box problem", "boxlb"};
  app.require_subcommand(1);
  RunConfig c;
  std::string format = "text", mode = "sample";

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format, "text|csv|json-lines")->check(CLI::IsMember({"text", "csv", "json-lines"}));
    sub->add_option("--out", c.out_path, "write records to PATH instead of stdout");
  };
  auto add_params = [&](CLI::App* sub) {
    sub->add_option("--d", c.d, "uniformity")->check(CLI::Range(2, 16));
    sub->add_option("--r", c.r, "number of random forms")->check(CLI::Range(1, 64));
    sub->add_option("--s", c.s, "dimension of each part")->check(CLI::Range(1, 16));
    sub->add_option("--p", c.p, "field characteristic");
    sub->add_option("--k", c.k, "extension degree")->check(CLI::Range(1, 16));
    sub->add_option("--seed", c.seed, "base seed");
    sub->add_option("--budget-tuples", c.budget.tuples, "cap on (q^s)^d tuples");
    sub->add_option("--budget-tensor-space", c.budget.tensor_space,
                    "cap on q^(r s^d) form tuples in exact mode");
    add_format(sub);
  };

  auto* table = app.add_subcommand("table", "bounds comparison table");
  table->add_option("d_min", c.d_min, "smallest d")->required();
  table->add_option("d_max", c.d_max, "largest d")->required();
  table->add_option("--r-max", c.r_max, "largest r searched for the new bound")->check(CLI::Range(1, 1 << 20));
  add_format(table);

  auto* construct = app.add_subcommand("construct", "build, delete and verify one instance");
  add_params(construct);
  construct->add_flag("--emit-edges", c.emit_edges, "also write the edges of E'");

  auto* trials = app.add_subcommand("trials", "repeat the construction and aggregate");
  add_params(trials);
  trials->add_option("--trials", c.trials, "number of sampled trials");
  trials->add_option("--mode", mode, "exact|sample")->check(CLI::IsMember({"exact", "sample"}));
  trials->add_option("--delta", c.delta, "flag trials with |E'| >= (1-delta) q^(ds-r)")->check(CLI::Range(0.0, 1.0));
  trials->add_option("--workers", c.workers, "worker threads (0 = all cores)");

  auto* verify = app.add_subcommand("verify", "re-check a text dump written by construct");
  verify->add_option("dump", c.in_path, "dump file")->required();
  add_format(verify);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n' << app.help();
    return kUsage;
  }

  c.format = *parse_format(format);
  c.mode = mode == "exact" ? Mode::exact : Mode::sampled;

  std::ofstream file;
  std::ostream* data = &out;
  if (!c.out_path.empty()) {
    file.open(c.out_path);
    if (!file) {
      err << "cannot open " << c.out_path << '\n';
      return kUsage;
    }
    data = &file;
  }

  try {
    if (table->parsed()) {
      c.command = "table";
      return cmd_table(c, *data, err);
    }
    if (construct->parsed()) {
      c.command = "construct";
      return cmd_construct(c, *data, err);
    }
    if (trials->parsed()) {
      c.command = "trials";
      return cmd_trials(c, *data, err);
    }
    c.command = "verify";
    std::ifstream in(c.in_path);
    if (!in) {
      err << "cannot open " << c.in_path << '\n';
      return kUsage;
    }
    return cmd_verify(c, in, *data, err);
  } catch (const FieldError& e) {
    err << "invalid field: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace boxlb::cli
