// Command-line surface: ingest FloerData documents, run validation,
// homology, invariant extraction, exact-sequence and spectral-sequence
// computations, emit graded tables.
//
// Exit codes: 0 success, 1 validation/exactness failure, 2 input error,
// 3 inconclusive window.

#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "floer/document.hpp"

using namespace floer;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailedCheck = 1;
constexpr int kExitInputError = 2;
constexpr int kExitInconclusive = 3;

unsigned thread_count() {
  const char* env = std::getenv("FLOER_THREADS");
  if (!env) return 1;
  int n = std::atoi(env);
  return n > 1 ? unsigned(n) : 1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path, std::string{});
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FloerDocument load(const std::string& path) {
  return parse_document(read_file(path));
}

Window parse_window(const std::string& text) {
  auto dots = text.find("..");
  if (dots == std::string::npos)
    throw ParseError("window must be written lo..hi", std::string{});
  Window w{Rational::parse(text.substr(0, dots)),
           Rational::parse(text.substr(dots + 2))};
  if (!(w.lo < w.hi)) throw ParseError("window is empty", std::string{});
  return w;
}

struct TableRow {
  std::string degree;
  std::string dim;
  std::string edge;
};

void print_table(const std::vector<TableRow>& rows, bool csv) {
  if (csv) {
    std::cout << "degree,dimension,edge\n";
    for (const auto& r : rows)
      std::cout << r.degree << "," << r.dim << "," << r.edge << "\n";
    return;
  }
  std::size_t wd = 6, wv = 3;
  for (const auto& r : rows) {
    wd = std::max(wd, r.degree.size());
    wv = std::max(wv, r.dim.size());
  }
  std::cout << std::left;
  auto pad = [](const std::string& s, std::size_t w) {
    std::string out = s;
    out.resize(std::max(w, s.size()), ' ');
    return out;
  };
  std::cout << pad("degree", wd) << "  " << pad("dim", wv) << "  edge\n";
  for (const auto& r : rows)
    std::cout << pad(r.degree, wd) << "  " << pad(r.dim, wv) << "  " << r.edge
              << "\n";
}

GradedComplex invariant_complex(const FloerDocument& doc, Flavor flavor,
                                const Window& w, GradedMap* inclusion_out) {
  if (!doc.involution)
    throw ParseError("document carries no involution", "/involution");
  GradedComplex c = assemble_flavor(doc.data, flavor, w);
  GradedMap j = assembled_involution(doc.data, c, doc.involution->cell_map);
  Subcomplex sub = invariant_subcomplex(c, j);
  if (inclusion_out) *inclusion_out = sub.inclusion;
  return sub.complex;
}

int cmd_validate(const std::string& path, std::optional<std::string> window) {
  FloerDocument doc = load(path);
  Window w = window ? parse_window(*window) : doc.window;
  FloerValidation v = validate(doc.data, w);
  for (const auto& e : v.errors) std::cout << "error: " << e << "\n";
  for (const auto& warn : v.warnings) std::cout << "warning: " << warn << "\n";
  for (const auto& c : v.component_identities)
    std::cout << "identity " << c.name << ": "
              << (c.ok ? "ok" : c.edge ? "edge" : "FAIL") << "\n";
  bool pass = v.passed;
  if (doc.involution) {
    InvolutionReport ir = validate_involution(doc.data, *doc.involution, w);
    for (const auto& e : ir.errors) std::cout << "error: " << e << "\n";
    std::cout << "involution: " << (ir.passed ? "ok" : "FAIL") << "\n";
    pass = pass && ir.passed;
  }
  std::cout << (pass ? "valid" : "invalid") << "\n";
  return pass ? kExitOk : kExitFailedCheck;
}

int cmd_homology(const std::string& path, const std::string& flavor_name,
                 bool invariant, bool csv, std::optional<std::string> window) {
  FloerDocument doc = load(path);
  Window w = window ? parse_window(*window) : doc.window;
  auto flavor = flavor_from_string(flavor_name);
  if (!flavor) throw ParseError("unknown flavor: " + flavor_name, std::string{});

  GradedComplex c = invariant
                        ? invariant_complex(doc, *flavor, w, nullptr)
                        : assemble_flavor(doc.data, *flavor, w);
  Homology h = homology(c);
  std::vector<TableRow> rows;
  for (const auto& [deg, labels] : c.space.degrees()) {
    if (labels.empty()) continue;
    bool edge = !c.window.interior(deg, 1);
    rows.push_back({deg.to_string(),
                    edge ? "-" : std::to_string(h.dim(deg)),
                    edge ? "yes" : "no"});
  }
  print_table(rows, csv);
  return kExitOk;
}

int cmd_invariants(const std::string& path, std::optional<std::string> window) {
  FloerDocument doc = load(path);
  Window w = window ? parse_window(*window) : doc.window;
  if (!doc.involution || !doc.q_ops || !doc.v_ops)
    throw ParseError("document lacks involution or module operators",
                     std::string{});
  StandardModuleParams t = classify_image_i(doc.data, *doc.involution,
                                            *doc.q_ops, *doc.v_ops, w);
  std::cout << "alpha=" << t.alpha.to_string() << " beta=" << t.beta.to_string()
            << " gamma=" << t.gamma.to_string() << "\n";
  return kExitOk;
}

int cmd_les(const std::string& path, bool total,
            std::optional<std::string> window) {
  FloerDocument doc = load(path);
  Window w = window ? parse_window(*window) : doc.window;
  IjpMaps maps = assemble_ijp(doc.data, w);

  GradedComplex bar = maps.bar, check = maps.check, hat = maps.hat;
  GradedMap i = maps.i, j = maps.j, p = maps.p;
  if (!total) {
    if (!doc.involution)
      throw ParseError("document carries no involution", "/involution");
    GradedMap jb = assembled_involution(doc.data, maps.bar,
                                        doc.involution->cell_map);
    GradedMap jc = assembled_involution(doc.data, maps.check,
                                        doc.involution->cell_map);
    GradedMap jh = assembled_involution(doc.data, maps.hat,
                                        doc.involution->cell_map);
    Subcomplex sb = invariant_subcomplex(maps.bar, jb);
    Subcomplex sc = invariant_subcomplex(maps.check, jc);
    Subcomplex sh = invariant_subcomplex(maps.hat, jh);
    auto restrict = [](const GradedMap& m, const Subcomplex& src,
                       const Subcomplex& tgt) {
      GradedMap out(src.complex.space, tgt.complex.space, m.degree_shift());
      for (const auto& [deg, labels] : src.complex.space.degrees()) {
        if (labels.empty()) continue;
        Rational tdeg = deg + m.degree_shift();
        gf2::BitMatrix image = m.block(deg).multiply(src.inclusion.block(deg));
        gf2::BitMatrix inc = tgt.inclusion.block(tdeg);
        gf2::BitMatrix blk(tgt.complex.space.dim(tdeg), labels.size());
        for (std::size_t col = 0; col < labels.size(); ++col) {
          gf2::BitVector v(image.rows());
          for (std::size_t r = 0; r < image.rows(); ++r)
            if (image.get(r, col)) v.set(r, true);
          if (v.is_zero()) continue;
          auto sol = gf2::solve(inc, v);
          if (!sol)
            throw std::invalid_argument(
                "map does not preserve invariant chains");
          for (std::size_t k = 0; k < sol->length(); ++k)
            if (sol->get(k)) blk.set(k, col, true);
        }
        out.set_block(deg, blk);
      }
      return out;
    };
    i = restrict(maps.i, sb, sc);
    j = restrict(maps.j, sc, sh);
    p = restrict(maps.p, sh, sb);
    bar = sb.complex;
    check = sc.complex;
    hat = sh.complex;
  }

  Homology hb = homology(bar), hc = homology(check), hh = homology(hat);
  GradedMap i_star = induced_map(i, hb, hc);
  GradedMap j_star = induced_map(j, hc, hh);
  GradedMap p_star = induced_map(p, hh, hb);
  ExactnessReport rep =
      check_exactness({i_star, j_star, p_star, i_star, j_star}, w);
  const char* names[] = {"", "to", "from", "bar", "to"};
  for (const auto& junction : rep.junctions) {
    if (junction.edge) continue;
    std::cout << "junction " << names[junction.junction] << " degree "
              << junction.degree.to_string() << ": "
              << (junction.ok ? "exact" : "FAIL") << "\n";
  }
  std::cout << (rep.passed ? "exact" : "inexact") << "\n";
  return rep.passed ? kExitOk : kExitFailedCheck;
}

int cmd_gysin(const std::string& path, const std::string& flavor_name,
              std::optional<std::string> window) {
  FloerDocument doc = load(path);
  Window w = window ? parse_window(*window) : doc.window;
  if (!doc.involution)
    throw ParseError("document carries no involution", "/involution");
  std::vector<Flavor> flavors;
  if (flavor_name == "all")
    flavors = {Flavor::Check, Flavor::Hat, Flavor::Bar};
  else {
    auto f = flavor_from_string(flavor_name);
    if (!f) throw ParseError("unknown flavor: " + flavor_name, std::string{});
    flavors = {*f};
  }

  bool pass = true;
  std::vector<GysinReport> reports(flavors.size());
  if (thread_count() > 1 && flavors.size() > 1) {
    std::vector<std::future<GysinReport>> jobs;
    for (Flavor f : flavors)
      jobs.push_back(std::async(std::launch::async, [&, f] {
        return gysin_sequence(doc.data, *doc.involution, f, w);
      }));
    for (std::size_t k = 0; k < jobs.size(); ++k) reports[k] = jobs[k].get();
  } else {
    for (std::size_t k = 0; k < flavors.size(); ++k)
      reports[k] = gysin_sequence(doc.data, *doc.involution, flavors[k], w);
  }
  for (std::size_t k = 0; k < flavors.size(); ++k) {
    const GysinReport& rep = reports[k];
    std::size_t interior_junctions = 0;
    for (const auto& junction : rep.exactness.junctions)
      if (!junction.edge) ++interior_junctions;
    std::cout << to_string(flavors[k]) << ": "
              << (rep.exactness.passed && rep.quasi_isomorphism_ok ? "exact"
                                                                   : "FAIL")
              << " (" << interior_junctions << " interior junctions)\n";
    pass = pass && rep.exactness.passed && rep.quasi_isomorphism_ok;
  }
  return pass ? kExitOk : kExitFailedCheck;
}

int cmd_specseq(const std::string& path, std::size_t pages, bool total,
                std::optional<std::string> window) {
  FloerDocument doc = load(path);
  Window w = window ? parse_window(*window) : doc.window;
  if (doc.filtration.empty())
    throw ParseError("document carries no filtration", "/filtration");

  GradedComplex ambient = assemble_flavor(doc.data, Flavor::Check, w);
  FilteredComplex filtered;
  if (total) {
    filtered.complex = ambient;
    for (const auto& [deg, labels] : ambient.space.degrees())
      for (const auto& label : labels)
        filtered.level[label] =
            doc.filtration.at(label.substr(0, label.find(':')));
  } else {
    if (!doc.involution)
      throw ParseError("document carries no involution", "/involution");
    GradedMap j =
        assembled_involution(doc.data, ambient, doc.involution->cell_map);
    Subcomplex sub = invariant_subcomplex(ambient, j);
    filtered.complex = sub.complex;
    for (const auto& [deg, labels] : sub.complex.space.degrees())
      for (std::size_t idx = 0; idx < labels.size(); ++idx) {
        gf2::BitMatrix inc = sub.inclusion.block(deg);
        int level = 0;
        for (std::size_t r = 0; r < inc.rows(); ++r)
          if (inc.get(r, idx)) {
            const std::string& amb = ambient.space.basis(deg)[r];
            level = doc.filtration.at(amb.substr(0, amb.find(':')));
            break;
          }
        filtered.level[labels[idx]] = level;
      }
  }

  SpectralSequenceResult ss = spectral_sequence(filtered, pages);
  for (const auto& page : ss.pages) {
    std::cout << "page " << page.index << ":";
    std::map<Rational, std::size_t> totals;
    for (const auto& e : page.entries) totals[e.degree] += e.dim;
    for (const auto& [deg, dim] : totals)
      std::cout << " " << deg.to_string() << ":" << dim;
    std::cout << "\n";
  }
  std::cout << "nonzero differentials on pages:";
  for (auto r : ss.nonzero_differential_pages) std::cout << " " << r;
  std::cout << "\ncollapse page: " << ss.collapse_page << "\n";
  return kExitOk;
}

int cmd_model(const std::string& name, const std::string& window_text,
              const std::string& emit_path, bool dual, bool no_involution,
              bool no_module_ops, bool no_filtration) {
  ModelSpec spec;
  spec.name = name;
  spec.window = parse_window(window_text);
  spec.options.involution = !no_involution;
  spec.options.module_operators = !no_module_ops;
  spec.options.energy_filtration = !no_filtration;
  ModelBundle bundle = generate(spec);
  if (dual) bundle = dual_of(bundle);
  FloerDocument doc = document_from_bundle(bundle, spec.window);
  std::ofstream out(emit_path, std::ios::binary);
  if (!out) throw ParseError("cannot write file: " + emit_path, std::string{});
  out << emit_document(doc);
  std::cout << "wrote " << emit_path << "\n";
  if (bundle.cobordism_target) {
    FloerDocument tgt;
    tgt.data = *bundle.cobordism_target;
    tgt.involution = bundle.cobordism_target_involution;
    tgt.window = spec.window;
    std::string tgt_path = emit_path + ".target.json";
    std::string ops_path = emit_path + ".ops.json";
    std::ofstream(tgt_path, std::ios::binary) << emit_document(tgt);
    OperatorSetDocument ops{*bundle.cobordism_ops};
    std::ofstream(ops_path, std::ios::binary) << emit_operator_set(ops);
    std::cout << "wrote " << tgt_path << "\nwrote " << ops_path << "\n";
  }
  return kExitOk;
}

int cmd_cobmap(const std::string& src_path, const std::string& tgt_path,
               const std::string& ops_path, std::optional<std::string> window) {
  FloerDocument src = load(src_path);
  FloerDocument tgt = load(tgt_path);
  OperatorSetDocument ops = parse_operator_set(read_file(ops_path));
  Window w = window ? parse_window(*window) : src.window;

  CobordismMaps maps = assemble_cobordism(src.data, tgt.data, ops.ops, w);
  std::cout << "chain maps: ok\n";
  const std::vector<std::tuple<const char*, const GradedComplex*,
                               const GradedComplex*, const GradedMap*>>
      rows = {{"check", &maps.src_check, &maps.tgt_check, &maps.check_map},
              {"hat", &maps.src_hat, &maps.tgt_hat, &maps.hat_map},
              {"bar", &maps.src_bar, &maps.tgt_bar, &maps.bar_map}};
  for (const auto& [name, s, t, m] : rows) {
    Homology hs = homology(*s);
    Homology ht = homology(*t);
    GradedMap ind = induced_map(*m, hs, ht);
    for (const auto& [deg, labels] : hs.space.degrees()) {
      if (labels.empty() || !w.interior(deg, 2)) continue;
      Rational tdeg = deg + ops.ops.degree;
      std::cout << name << " " << deg.to_string() << " -> "
                << tdeg.to_string() << ": rank " << gf2::rank(ind.block(deg))
                << " of " << labels.size() << " -> " << ht.dim(tdeg) << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Morse-Bott monopole Floer chain-complex calculator over GF(2)"};
  app.require_subcommand(1);

  std::string doc_path, flavor = "check", window_text, emit_path, name;
  std::string src_path, tgt_path, ops_path;
  std::optional<std::string> window;
  bool invariant = false, csv = false, total = false, dual = false;
  bool no_involution = false, no_module_ops = false, no_filtration = false;
  std::size_t pages = 4;

  auto add_window = [&](CLI::App* cmd) {
    cmd->add_option("--window", window, "degree window lo..hi");
  };

  CLI::App* validate_cmd = app.add_subcommand("validate", "validate a document");
  validate_cmd->add_option("document", doc_path)->required();
  add_window(validate_cmd);

  CLI::App* homology_cmd =
      app.add_subcommand("homology", "graded dimension table");
  homology_cmd->add_option("document", doc_path)->required();
  homology_cmd->add_option("--flavor", flavor, "check | hat | bar")->required();
  homology_cmd->add_flag("--invariant", invariant,
                         "homology of the invariant subcomplex");
  homology_cmd->add_flag("--csv", csv, "CSV output");
  add_window(homology_cmd);

  CLI::App* invariants_cmd =
      app.add_subcommand("invariants", "Manolescu alpha/beta/gamma");
  invariants_cmd->add_option("document", doc_path)->required();
  add_window(invariants_cmd);

  CLI::App* les_cmd = app.add_subcommand("les", "i/j/p long exact sequence");
  les_cmd->add_option("document", doc_path)->required();
  les_cmd->add_flag("--total", total, "use the non-invariant complexes");
  add_window(les_cmd);

  CLI::App* gysin_cmd = app.add_subcommand("gysin", "Gysin sequence report");
  gysin_cmd->add_option("document", doc_path)->required();
  gysin_cmd->add_option("--flavor", flavor, "check | hat | bar | all");
  add_window(gysin_cmd);

  CLI::App* specseq_cmd =
      app.add_subcommand("specseq", "energy-filtration spectral sequence");
  specseq_cmd->add_option("document", doc_path)->required();
  specseq_cmd->add_option("--pages", pages, "pages to compute")->required();
  specseq_cmd->add_flag("--total", total, "use the non-invariant complex");
  add_window(specseq_cmd);

  CLI::App* model_cmd = app.add_subcommand("model", "emit a builtin model");
  model_cmd->add_option("name", name)->required();
  model_cmd->add_option("--window", window_text, "degree window lo..hi")
      ->required();
  model_cmd->add_option("--emit", emit_path, "output path")->required();
  model_cmd->add_flag("--dual", dual, "orientation-reversed model");
  model_cmd->add_flag("--no-involution", no_involution);
  model_cmd->add_flag("--no-module-operators", no_module_ops);
  model_cmd->add_flag("--no-filtration", no_filtration);

  CLI::App* cobmap_cmd =
      app.add_subcommand("cobmap", "verify and tabulate a cobordism map");
  cobmap_cmd->add_option("--src", src_path)->required();
  cobmap_cmd->add_option("--tgt", tgt_path)->required();
  cobmap_cmd->add_option("--ops", ops_path)->required();
  add_window(cobmap_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate_cmd->parsed()) return cmd_validate(doc_path, window);
    if (homology_cmd->parsed())
      return cmd_homology(doc_path, flavor, invariant, csv, window);
    if (invariants_cmd->parsed()) return cmd_invariants(doc_path, window);
    if (les_cmd->parsed()) return cmd_les(doc_path, total, window);
    if (gysin_cmd->parsed()) return cmd_gysin(doc_path, flavor, window);
    if (specseq_cmd->parsed())
      return cmd_specseq(doc_path, pages, total, window);
    if (model_cmd->parsed())
      return cmd_model(name, window_text, emit_path, dual, no_involution,
                       no_module_ops, no_filtration);
    if (cobmap_cmd->parsed())
      return cmd_cobmap(src_path, tgt_path, ops_path, window);
  } catch (const InconclusiveWindow& e) {
    std::cerr << "inconclusive window: " << e.what() << "\n";
    return kExitInconclusive;
  } catch (const ParseError& e) {
    if (e.line > 0)
      std::cerr << "parse error at line " << e.line << ", column " << e.column
                << ": " << e.what() << "\n";
    else if (!e.path.empty())
      std::cerr << "input error at " << e.path << ": " << e.what() << "\n";
    else
      std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return kExitFailedCheck;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}
