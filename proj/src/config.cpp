#include "qotto/experiment.hpp"
#include "qotto/toml_lite.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace qotto {

namespace {

constexpr std::array<std::pair<ExperimentKind, std::string_view>, 6> kKinds{{
    {ExperimentKind::thermal, "thermal"},
    {ExperimentKind::montecarlo, "montecarlo"},
    {ExperimentKind::daemon, "daemon"},
    {ExperimentKind::cavity, "cavity"},
    {ExperimentKind::region, "region"},
    {ExperimentKind::sweep, "sweep"},
}};

constexpr std::array<std::string_view, 4> kSweepParameters{
    "gaps.delta1", "gaps.delta2", "bath1.temperature", "bath2.temperature"};

// largest integer a double holds exactly
constexpr double kMaxExactInteger = 9007199254740992.0;

class Section {
public:
  Section(const toml::Table* table, std::string prefix, const std::string& source,
          int line)
      : table_(table), prefix_(std::move(prefix)), source_(source), line_(line) {}

  bool present() const { return table_ != nullptr; }

  std::optional<double> real(std::string_view key) {
    const toml::Value* v = take(key);
    if (!v)
      return std::nullopt;
    if (const auto* d = std::get_if<double>(&v->data))
      return *d;
    if (const auto* i = std::get_if<std::int64_t>(&v->data))
      return static_cast<double>(*i);
    type_error(key, *v, "a number");
  }

  std::optional<std::uint64_t> count(std::string_view key,
                                     std::uint64_t minimum = 0) {
    const toml::Value* v = take(key);
    if (!v)
      return std::nullopt;
    std::uint64_t out = 0;
    if (const auto* i = std::get_if<std::int64_t>(&v->data)) {
      if (*i < 0)
        fail(key, v->line, "must be non-negative, got " + std::to_string(*i));
      out = static_cast<std::uint64_t>(*i);
    } else if (const auto* d = std::get_if<double>(&v->data)) {
      // 1e6 style counts are accepted when they are exact integers
      if (!(*d >= 0.0 && *d <= kMaxExactInteger && std::floor(*d) == *d))
        fail(key, v->line, "must be a non-negative integer");
      out = static_cast<std::uint64_t>(*d);
    } else {
      type_error(key, *v, "an integer");
    }
    if (out < minimum)
      fail(key, v->line, "must be at least " + std::to_string(minimum));
    return out;
  }

  std::optional<std::string> text(std::string_view key) {
    const toml::Value* v = take(key);
    if (!v)
      return std::nullopt;
    if (const auto* s = std::get_if<std::string>(&v->data))
      return *s;
    type_error(key, *v, "a string");
  }

  const toml::Value* raw(std::string_view key) { return take(key); }

  double required_real(std::string_view key) {
    auto v = real(key);
    if (!v)
      fail(key, line_, "is required");
    return *v;
  }

  /// Every key must have been read by now.
  void finish() const {
    if (!table_)
      return;
    for (const auto& [key, value] : table_->entries)
      if (!used_.count(key))
        fail(key, value.line, "unknown key");
  }

  [[noreturn]] void fail(std::string_view key, int line,
                         const std::string& message) const {
    throw ConfigError(source_, line, field(key), message);
  }

  std::string field(std::string_view key) const {
    return prefix_.empty() ? std::string(key) : prefix_ + "." + std::string(key);
  }

  int line() const { return line_; }

private:
  const toml::Table* table_;
  std::string prefix_;
  const std::string& source_;
  int line_;
  std::set<std::string, std::less<>> used_;

  const toml::Value* take(std::string_view key) {
    if (!table_)
      return nullptr;
    const toml::Value* v = table_->find(key);
    if (v)
      used_.emplace(key);
    return v;
  }

  [[noreturn]] void type_error(std::string_view key, const toml::Value& v,
                               const char* expected) const {
    fail(key, v.line,
         std::string("expected ") + expected + ", got " +
             std::string(v.type_name()));
  }
};

bool is_sweep_parameter(std::string_view name) {
  return std::find(kSweepParameters.begin(), kSweepParameters.end(), name) !=
         kSweepParameters.end();
}

std::set<std::string_view> sections_for(ExperimentKind kind) {
  switch (kind) {
  case ExperimentKind::thermal:
    return {"gaps", "bath1", "bath2", "output"};
  case ExperimentKind::montecarlo:
    return {"gaps", "bath1", "bath2", "probabilities", "montecarlo", "output"};
  case ExperimentKind::daemon:
    return {"gaps", "bath1", "bath2", "probabilities", "daemon", "output"};
  case ExperimentKind::cavity:
    return {"gaps", "bath1", "bath2", "cavity", "output"};
  case ExperimentKind::region:
    return {"gaps", "bath1", "bath2", "cavity", "output"};
  case ExperimentKind::sweep:
    return {"gaps", "bath1", "bath2", "cavity", "sweep", "output"};
  }
  return {};
}

void parse_sweep(Section& sec, ExperimentConfig& cfg) {
  if (!sec.present())
    throw ConfigError(cfg.source, 0, "sweep", "section is required");

  const toml::Value* obs = sec.raw("observables");
  if (!obs)
    sec.fail("observables", sec.line(), "is required");
  const auto* list = std::get_if<toml::Array>(&obs->data);
  if (!list || list->empty())
    sec.fail("observables", obs->line, "expected a non-empty array of names");
  const auto& known = sweep_observables();
  for (const auto& item : *list) {
    const auto* name = std::get_if<std::string>(&item.data);
    if (!name)
      sec.fail("observables", item.line, "entries must be strings");
    if (is_sweep_parameter(*name))
      sec.fail("observables", item.line,
               "'" + *name + "' is a parameter; parameters are always included");
    if (std::find(known.begin(), known.end(), *name) == known.end())
      sec.fail("observables", item.line, "unknown observable '" + *name + "'");
    if (std::find(cfg.observables.begin(), cfg.observables.end(), *name) !=
        cfg.observables.end())
      sec.fail("observables", item.line, "duplicate observable '" + *name + "'");
    cfg.observables.push_back(*name);
  }

  const toml::Value* axes = sec.raw("axis");
  if (!axes)
    sec.fail("axis", sec.line(), "at least one [[sweep.axis]] is required");
  const auto* axis_list = std::get_if<toml::Array>(&axes->data);
  if (!axis_list)
    sec.fail("axis", axes->line, "expected [[sweep.axis]] tables");
  if (axis_list->empty() || axis_list->size() > 2)
    sec.fail("axis", axes->line,
             "a sweep takes 1 or 2 axes, got " +
                 std::to_string(axis_list->size()));

  for (std::size_t i = 0; i < axis_list->size(); ++i) {
    const toml::Value& entry = (*axis_list)[i];
    const auto* table = std::get_if<toml::Table>(&entry.data);
    const std::string prefix = "sweep.axis[" + std::to_string(i) + "]";
    if (!table)
      throw ConfigError(cfg.source, entry.line, prefix, "expected a table");
    Section ax(table, prefix, cfg.source, entry.line);
    SweepAxis axis;
    const auto name = ax.text("name");
    if (!name)
      ax.fail("name", entry.line, "is required");
    if (!is_sweep_parameter(*name))
      ax.fail("name", table->find("name")->line,
              "'" + *name +
                  "' cannot be swept; choose one of gaps.delta1, gaps.delta2, "
                  "bath1.temperature, bath2.temperature (derived quantities "
                  "follow from these)");
    for (const auto& other : cfg.axes)
      if (other.name == *name)
        ax.fail("name", table->find("name")->line, "axis repeated: " + *name);
    axis.name = *name;
    axis.min = ax.required_real("min");
    axis.max = ax.required_real("max");
    if (!std::isfinite(axis.min) || !std::isfinite(axis.max))
      ax.fail("min", entry.line, "axis bounds must be finite");
    if (axis.min == axis.max)
      ax.fail("max", table->find("max")->line,
              "zero-width axis (min == max == " + format_double(axis.min) + ")");
    const auto steps = ax.count("steps", 2);
    if (!steps)
      ax.fail("steps", entry.line, "is required");
    axis.steps = *steps;
    ax.finish();
    cfg.axes.push_back(axis);
  }
  sec.finish();
}

} // namespace

std::optional<ExperimentKind> parse_kind(std::string_view name) {
  for (const auto& [kind, text] : kKinds)
    if (text == name)
      return kind;
  return std::nullopt;
}

std::string_view kind_name(ExperimentKind kind) {
  for (const auto& [k, text] : kKinds)
    if (k == kind)
      return text;
  return "?";
}

namespace {

std::string format_config_error(const std::string& source, int line,
                                const std::string& field,
                                const std::string& message) {
  std::string out = source;
  if (line > 0)
    out += ":" + std::to_string(line);
  out += ": ";
  if (!field.empty())
    out += field + ": ";
  return out + message;
}

} // namespace

ConfigError::ConfigError(const std::string& source, int line,
                         const std::string& field, const std::string& message)
    : std::runtime_error(format_config_error(source, line, field, message)),
      line_(line), field_(field) {}

double SweepAxis::value(std::uint64_t i) const {
  if (i + 1 >= steps)
    return max;
  return min + (max - min) * static_cast<double>(i) /
                   static_cast<double>(steps - 1);
}

ExperimentConfig parse_config(std::string_view text, ExperimentKind kind,
                              const std::string& source) {
  toml::Table root;
  try {
    root = toml::parse(text);
  } catch (const toml::ParseError& e) {
    // what() already carries "line N: "
    throw ConfigError(source, e.line(), "",
                      std::string(e.what()).substr(std::string(e.what()).find(": ") + 2));
  }

  ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.source = source;
  const auto allowed = sections_for(kind);

  Section top(&root, "", cfg.source, 1);
  std::map<std::string, std::pair<const toml::Table*, int>> sections;
  for (const auto& [key, value] : root.entries) {
    if (key == "kind" || key == "seed")
      continue;
    if (!value.is_table())
      top.fail(key, value.line, "unknown key");
    if (!allowed.count(key))
      top.fail(key, value.line,
               "section not used by the " + std::string(kind_name(kind)) +
                   " experiment");
    sections[key] = {&std::get<toml::Table>(value.data), value.line};
    top.raw(key);
  }
  auto section = [&](const char* name) {
    const auto it = sections.find(name);
    if (it == sections.end())
      return Section(nullptr, name, cfg.source, 0);
    return Section(it->second.first, name, cfg.source, it->second.second);
  };

  if (const auto k = top.text("kind"); k && *k != kind_name(kind))
    top.fail("kind", root.find("kind")->line,
             "file describes a '" + *k + "' experiment, not '" +
                 std::string(kind_name(kind)) + "'");
  if (const auto s = top.raw("seed")) {
    const auto* i = std::get_if<std::int64_t>(&s->data);
    if (!i || *i < 0)
      top.fail("seed", s->line, "expected a non-negative integer");
    cfg.seed = RngSeed{static_cast<std::uint64_t>(*i)};
  }
  top.finish();

  Section gaps = section("gaps");
  if (!gaps.present())
    throw ConfigError(cfg.source, 0, "gaps", "section is required");
  cfg.delta1 = gaps.required_real("delta1");
  cfg.delta2 = gaps.required_real("delta2");
  gaps.finish();

  Section bath1 = section("bath1");
  Section bath2 = section("bath2");
  cfg.temperature1 = bath1.real("temperature");
  cfg.temperature2 = bath2.real("temperature");
  if (bath1.present() && !cfg.temperature1)
    bath1.fail("temperature", bath1.line(), "is required");
  if (bath2.present() && !cfg.temperature2)
    bath2.fail("temperature", bath2.line(), "is required");
  bath1.finish();
  bath2.finish();

  Section probs = section("probabilities");
  if (probs.present()) {
    if (bath1.present() || bath2.present())
      throw ConfigError(cfg.source, probs.line(), "probabilities",
                        "give either [probabilities] or the two baths, not both");
    cfg.p_excite = probs.required_real("p_excite");
    cfg.p_deexcite_complement = probs.required_real("p_deexcite_complement");
    probs.finish();
  } else {
    if (!bath1.present())
      throw ConfigError(cfg.source, 0, "bath1", "section is required");
    if (!bath2.present())
      throw ConfigError(cfg.source, 0, "bath2", "section is required");
  }

  if (kind == ExperimentKind::montecarlo) {
    Section mc = section("montecarlo");
    cfg.n_cycles = mc.count("n_cycles", 1).value_or(cfg.n_cycles);
    cfg.max_run = mc.count("max_run", 1).value_or(cfg.max_run);
    mc.finish();
  }

  if (kind == ExperimentKind::daemon) {
    Section d = section("daemon");
    cfg.n_attempts = d.count("n_attempts", 1).value_or(cfg.n_attempts);
    cfg.erase_temperature = d.real("erase_temperature");
    cfg.measurement_cap = d.count("measurement_cap", 1).value_or(cfg.measurement_cap);
    d.finish();
    if (!cfg.erase_temperature && !cfg.temperature2)
      throw ConfigError(cfg.source, d.line(), "daemon.erase_temperature",
                        "is required when the baths are not given");
  }

  if (kind == ExperimentKind::cavity || kind == ExperimentKind::region ||
      kind == ExperimentKind::sweep) {
    Section cav = section("cavity");
    cfg.coupling = cav.real("coupling").value_or(cfg.coupling);
    cfg.trunc_eps = cav.real("trunc_eps").value_or(cfg.trunc_eps);
    if (kind == ExperimentKind::cavity) {
      cfg.p0 = cav.real("p0").value_or(cfg.p0);
      cfg.t_max = cav.real("t_max").value_or(cfg.t_max);
      cfg.samples = cav.count("samples", 2).value_or(cfg.samples);
      cfg.grid = cav.count("grid", 2).value_or(cfg.grid);
      cfg.refine_tol = cav.real("refine_tol").value_or(cfg.refine_tol);
      if (!(cfg.t_max > 0.0) || !std::isfinite(cfg.t_max))
        cav.fail("t_max", cav.line(), "must be positive and finite");
      if (!(cfg.refine_tol > 0.0))
        cav.fail("refine_tol", cav.line(), "must be positive");
    }
    cav.finish();
  }

  if (kind == ExperimentKind::sweep) {
    Section sw = section("sweep");
    parse_sweep(sw, cfg);
  }

  Section out = section("output");
  if (const auto dir = out.text("dir"))
    cfg.out_dir = *dir;
  cfg.stem = out.text("stem").value_or(std::string(kind_name(kind)));
  if (cfg.stem.empty() || cfg.stem.find_first_of("/\\") != std::string::npos ||
      cfg.stem == "." || cfg.stem == "..")
    out.fail("stem", out.line(), "must be a plain file name");
  out.finish();

  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             ExperimentKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError(path.string(), 0, "", "cannot open configuration file");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad())
    throw ConfigError(path.string(), 0, "", "read failed");
  return parse_config(buf.str(), kind, path.string());
}

} // namespace qotto
