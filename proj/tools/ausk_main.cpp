#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "ausk/dsl.hpp"
#include "json.hpp"

using namespace ausk;
using nlohmann::json;

namespace {

struct Loaded {
  SourceFile file;
  Registry reg;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::UsageError, "cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

Loaded load(const std::string& path) {
  Loaded l;
  l.file = parse_dsl(slurp(path), path);
  l.reg = elaborate_file(l.file, default_kernel_options());
  return l;
}

Settings settings_from(const std::string& universe, int bound, int depth) {
  Settings s;
  s.bound = bound;
  s.depth = depth;
  s.universe.clear();
  size_t start = 0;
  while (start < universe.size()) {
    size_t comma = universe.find(',', start);
    std::string piece = universe.substr(start, comma == std::string::npos ? comma : comma - start);
    if (!piece.empty()) s.universe.push_back(piece);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return s;
}

ContextMap extension_map_of(const Registry& reg, const std::string& ext_name) {
  auto it = reg.extension_base.find(ext_name);
  if (it == reg.extension_base.end())
    fail(ErrorKind::UsageError, ext_name + " is not an extension declaration");
  return extension_map(reg.context(it->second), reg.context(ext_name));
}

json model_json(const Model& m) {
  json j;
  j["context"] = m.ctx->name;
  j["depth"] = m.depth;
  for (const auto& [n, s] : m.nodes) j["nodes"][n] = s.text();
  for (const auto& [e, f] : m.edges) j["edges"][e] = f.text();
  for (const auto& [u, v] : m.verdicts) j["universals"][u] = verdict_name(v);
  return j;
}

int run_check(const std::string& path) {
  SourceFile f = parse_dsl(slurp(path), path);
  // round-trip stability is part of the contract
  SourceFile again = parse_dsl(pretty_print(f), path + "<pretty>");
  if (pretty_print(again) != pretty_print(f)) {
    std::cout << "FAIL: pretty-print round trip diverges\n";
    return 1;
  }
  Registry reg = elaborate_file(f, default_kernel_options());
  bool ok = true;
  for (const std::string& name : reg.context_order) {
    WellFormedReport rep = validate_sketch(reg.context(name)->derived);
    std::cout << "context " << name << ": " << (rep.ok() ? "ok" : "violations") << "\n";
    if (!rep.ok()) {
      std::cout << rep.text();
      ok = false;
    }
  }
  for (const std::string& name : reg.map_order) std::cout << "map " << name << ": ok\n";
  for (const std::string& name : reg.model_order) {
    Model m = reg.model(name, 4);
    StrictnessReport rep = check_model(m, 4);
    bool good = rep.valid() && rep.problems.empty();
    std::cout << "model " << name << ": " << (good ? "ok" : "invalid") << "\n";
    if (!good) {
      std::cout << rep.text();
      ok = false;
    }
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"calculus of arithmetic-universe sketches"};
  app.require_subcommand(1);

  std::string path, ctx_name, ext_name, model_name, map_name, maps_arg, functor_spec = "tag:t";
  std::string universe = "a,b", format = "text";
  int bound = 2, depth = 4, cells = 100;
  bool serial = false, do_normalize = false, sweep = false, with_models = false;

  auto add_common = [&](CLI::App* c) {
    c->add_option("file", path, "source file")->required();
    c->add_option("--universe", universe, "atom universe, comma separated");
    c->add_option("--bound", bound, "size bound for primitive nodes");
    c->add_option("--depth", depth, "realization depth for enumerable objects");
    c->add_flag("--serial", serial, "use the serial reference enumeration");
  };

  CLI::App* c_check = app.add_subcommand("check", "elaborate and validate a file");
  c_check->add_option("file", path)->required();

  CLI::App* c_models = app.add_subcommand("models", "enumerate strict models of a context");
  add_common(c_models);
  c_models->add_option("--ctx", ctx_name, "context name")->required();

  CLI::App* c_arrow = app.add_subcommand("arrow", "build the arrow context of a context");
  add_common(c_arrow);
  c_arrow->add_option("--ctx", ctx_name)->required();
  c_arrow->add_flag("--models", with_models, "also enumerate its strict models");

  CLI::App* c_compose = app.add_subcommand("compose", "compose two declared maps");
  add_common(c_compose);
  c_compose->add_option("--maps", maps_arg, "comma separated map names, applied left to right")
      ->required();

  CLI::App* c_strict = app.add_subcommand("strictify", "strictify tagged models of an extension");
  add_common(c_strict);
  c_strict->add_option("--ext", ext_name)->required();
  c_strict->add_option("--functor", functor_spec, "functor spec, e.g. tag:t");
  c_strict->add_option("--model", model_name, "restrict to one declared model");

  CLI::App* c_sigma = app.add_subcommand("sigma", "coherence iso along a map");
  add_common(c_sigma);
  c_sigma->add_option("--map", map_name)->required();
  c_sigma->add_option("--functor", functor_spec);
  c_sigma->add_option("--model", model_name);

  CLI::App* c_gray = app.add_subcommand("gray", "check the cubical pasting conditions");
  add_common(c_gray);
  c_gray->add_flag("--sweep", sweep, "sweep sampled cells");
  c_gray->add_option("--cells", cells, "minimum number of sampled cells");

  CLI::App* c_compile = app.add_subcommand("compile", "compile an extension to geometric steps");
  c_compile->add_option("file", path)->required();
  c_compile->add_option("--ext", ext_name)->required();
  c_compile->add_option("--format", format, "text|json");
  c_compile->add_flag("--normalize", do_normalize, "also print the torsor/invert normal form");

  CLI::App* c_points = app.add_subcommand("points", "enumerate points of an instantiated theory");
  add_common(c_points);
  c_points->add_option("--ext", ext_name)->required();
  c_points->add_option("--model", model_name, "base model")->required();
  c_points->add_flag("--normalized", do_normalize, "drive the search by the normal form");

  CLI::App* c_export = app.add_subcommand("export", "export the elaborated file");
  c_export->add_option("file", path)->required();
  c_export->add_option("--format", format, "json|text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ExecMode mode = serial ? ExecMode::Serial : ExecMode::Parallel;
    Settings s = settings_from(universe, bound, depth);
    if (c_check->parsed()) return run_check(path);

    if (c_models->parsed()) {
      Loaded l = load(path);
      auto ms = enumerate_strict_models(l.reg.context(ctx_name), s, mode);
      std::cout << "ausk-v1 models ctx=" << ctx_name << " " << s.echo() << "\n";
      std::cout << "count " << ms.size() << "\n";
      for (const Model& m : ms) std::cout << m.text();
      return 0;
    }
    if (c_arrow->parsed()) {
      Loaded l = load(path);
      ArrowContext arr = arrow_context(l.reg.context(ctx_name), default_kernel_options());
      std::cout << "ausk-v1 arrow ctx=" << ctx_name << " " << s.echo() << "\n";
      std::cout << "nodes " << arr.ctx->derived.nodes.size() << " edges "
                << arr.ctx->derived.edges.size() << " steps " << arr.ctx->steps.size() << "\n";
      if (with_models) {
        auto ms = enumerate_strict_models(arr.ctx, s, mode);
        std::cout << "models " << ms.size() << "\n";
        for (const Model& m : ms) std::cout << m.text();
      }
      return 0;
    }
    if (c_compose->parsed()) {
      Loaded l = load(path);
      std::vector<std::string> names;
      size_t start = 0;
      while (start < maps_arg.size()) {
        size_t comma = maps_arg.find(',', start);
        names.push_back(maps_arg.substr(start, comma == std::string::npos ? comma : comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      if (names.size() < 2) fail(ErrorKind::UsageError, "--maps needs at least two names");
      ContextMap acc = l.reg.map(names[0]);
      for (size_t i = 1; i < names.size(); ++i)
        acc = compose_maps(acc, l.reg.map(names[i]), default_kernel_options());
      std::cout << "ausk-v1 compose " << s.echo() << "\n" << acc.text();
      return 0;
    }
    if (c_strict->parsed()) {
      Loaded l = load(path);
      ContextMap u = extension_map_of(l.reg, ext_name);
      AuFunctor f = parse_functor_spec(functor_spec);
      std::vector<Model> models;
      if (!model_name.empty()) {
        models.push_back(l.reg.model(model_name, depth));
      } else {
        models = enumerate_strict_models(u.dom, s, mode);
      }
      std::cout << "ausk-v1 strictify ext=" << ext_name << " functor=" << f.text() << " "
                << s.echo() << "\n";
      size_t idx = 0;
      for (const Model& n : models) {
        Model m1 = apply_functor(f, n);
        StrictifyResult base = reindex_with_iso(f, act(u, n));
        StrictifyResult r = strictify(u, m1, base.model, base.iso);
        bool identity = r.iso.is_identity();
        std::cout << "model " << idx++ << ": strictified, iso "
                  << (identity ? "identity" : "non-identity") << "\n";
      }
      return 0;
    }
    if (c_sigma->parsed()) {
      Loaded l = load(path);
      ContextMap h = l.reg.map(map_name);
      AuFunctor f = parse_functor_spec(functor_spec);
      std::vector<Model> models;
      if (!model_name.empty())
        models.push_back(l.reg.model(model_name, depth));
      else
        models = enumerate_strict_models(h.dom, s, mode);
      std::cout << "ausk-v1 sigma map=" << map_name << " functor=" << f.text() << " " << s.echo()
                << "\n";
      for (const Model& m : models) {
        SigmaCell cell = sigma(f, h, m);
        std::cout << cell.text();
      }
      return 0;
    }
    if (c_gray->parsed()) {
      Loaded l = load(path);
      if (!sweep) fail(ErrorKind::UsageError, "gray requires --sweep");
      // cells from declared maps plus identities, functor pairs and retags
      std::vector<AuFunctor> functors = {AuFunctor::identity(), AuFunctor::tagging("s"),
                                         AuFunctor::tagging("t")};
      std::vector<ContextMap> maps;
      for (const std::string& name : l.reg.map_order) maps.push_back(l.reg.map(name));
      for (const std::string& name : l.reg.context_order)
        maps.push_back(identity_map(l.reg.context(name)));
      int ran = 0, failed = 0;
      for (const ContextMap& h : maps) {
        for (const ContextMap& hp : maps) {
          if (!(h.cod->steps.size() == hp.dom->steps.size() && h.cod->is_prefix_of(*hp.dom)))
            continue;
          auto ms = enumerate_strict_models(h.dom, s, mode);
          for (const Model& m : ms) {
            for (size_t i = 0; i + 1 < functors.size() && ran < cells; ++i) {
              GrayInputs in;
              in.f0 = functors[i];
              in.f1 = functors[i + 1];
              in.alpha = NatTransform{functors[i], functors[i + 1]};
              in.h = h;
              in.hp = hp;
              in.m = m;
              in.opts = default_kernel_options();
              GrayReport rep = verify_gray(in);
              ++ran;
              if (!rep.pass()) {
                ++failed;
                std::cout << "cell " << ran << " (" << h.name << " ; " << hp.name << ")\n"
                          << rep.text();
              }
            }
          }
          if (ran >= cells) break;
        }
        if (ran >= cells) break;
      }
      std::cout << "ausk-v1 gray sweep cells=" << ran << " failures=" << failed << " " << s.echo()
                << "\n";
      return failed == 0 ? 0 : 1;
    }
    if (c_compile->parsed()) {
      Loaded l = load(path);
      ContextMap u = extension_map_of(l.reg, ext_name);
      GeometricExtension g = compile_geometric(u.cod, u.dom);
      if (format == "json") {
        json j;
        j["schema"] = "ausk-v1";
        j["base"] = g.base_name;
        for (const SimpleStep& st : g.steps) j["steps"].push_back(st.text());
        if (do_normalize)
          for (const NormalStep& st : normalize(g)) j["normal"].push_back(st.text());
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << g.text();
        if (do_normalize) {
          std::cout << "normal form:\n";
          for (const NormalStep& st : normalize(g)) std::cout << "  " << st.text() << "\n";
        }
      }
      return 0;
    }
    if (c_points->parsed()) {
      Loaded l = load(path);
      ContextMap u = extension_map_of(l.reg, ext_name);
      GeometricExtension g = compile_geometric(u.cod, u.dom);
      Model base = l.reg.model(model_name, depth);
      InstantiatedTheory t = instantiate(g, base);
      std::vector<Point> pts = do_normalize
                                   ? enumerate_points_normalized(t, normalize(g), s, mode)
                                   : enumerate_points(t, s, mode);
      std::cout << "ausk-v1 points ext=" << ext_name << " model=" << model_name << " " << s.echo()
                << "\n";
      std::cout << "count " << pts.size() << "\n";
      for (const Point& p : pts) std::cout << "  " << p.text() << "\n";
      return 0;
    }
    if (c_export->parsed()) {
      Loaded l = load(path);
      if (format == "text") {
        std::cout << pretty_print(l.file);
        return 0;
      }
      json j;
      j["schema"] = "ausk-v1";
      for (const std::string& name : l.reg.context_order) {
        ContextPtr c = l.reg.context(name);
        json jc;
        jc["name"] = name;
        if (l.reg.extension_base.count(name)) jc["base"] = l.reg.extension_base.at(name);
        for (const Step& st : c->steps) jc["steps"].push_back(step_text(st));
        for (const Name& n : c->primitive_nodes) jc["primitive_nodes"].push_back(n);
        for (const Name& e : c->primitive_edges) jc["primitive_edges"].push_back(e);
        j["contexts"].push_back(jc);
      }
      for (const std::string& name : l.reg.map_order) {
        ContextMap m = l.reg.map(name);
        json jm;
        jm["name"] = name;
        jm["dom"] = m.dom->name;
        jm["cod"] = m.cod->name;
        for (const auto& [a, b] : m.hom.node_map) jm["nodes"][a] = b;
        for (const auto& [a, b] : m.hom.edge_map) jm["edges"][a] = b;
        j["maps"].push_back(jm);
      }
      for (const std::string& name : l.reg.model_order)
        j["models"].push_back({{"name", name}, {"value", model_json(l.reg.model(name, depth))}});
      for (const std::string& name : l.reg.functor_order)
        j["functors"].push_back({{"name", name}, {"value", l.reg.functor(name).text()}});
      std::cout << j.dump(2) << "\n";
      return 0;
    }
  } catch (const AuskError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind == ErrorKind::ParseError || e.kind == ErrorKind::UsageError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
