#include "clamg/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>

namespace clamg {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_real(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used == v.size())
            return d;
    } catch (const std::exception&) {
    }
    throw Error("key '" + key + "': expected a number, got '" + v + "'");
}

long long to_integer(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long long d = std::stoll(v, &used);
        if (used == v.size())
            return d;
    } catch (const std::exception&) {
    }
    throw Error("key '" + key + "': expected an integer, got '" + v + "'");
}

bool to_switch(const std::string& key, const std::string& v) {
    if (v == "on" || v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "off" || v == "false" || v == "0" || v == "no")
        return false;
    throw Error("key '" + key + "': expected on or off, got '" + v + "'");
}

template <class E>
E to_enum(const std::string& key, const std::string& v, const std::map<std::string, E>& choices) {
    const auto it = choices.find(v);
    if (it != choices.end())
        return it->second;
    std::string all;
    for (const auto& [name, _] : choices)
        all += (all.empty() ? "" : ", ") + name;
    throw Error("key '" + key + "': '" + v + "' is not one of " + all);
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

struct KeyEntry {
    KeyInfo info;
    Setter set;
};

const std::vector<KeyEntry>& registry() {
    static const std::vector<KeyEntry> keys = [] {
        std::vector<KeyEntry> k;
        auto add = [&](std::string name, std::string help, Setter s) {
            k.push_back({{std::move(name), std::move(help)}, std::move(s)});
        };
        add("matrix", "input matrix file (.mtx or binary)", [](RunConfig& c, auto&, auto& v) { c.matrix = v; });
        add("gen", "generator spec kind:p1,p2,...", [](RunConfig& c, auto&, auto& v) { c.generator = v; });
        add("coords", "node coordinates file (Matrix Market array)",
            [](RunConfig& c, auto&, auto& v) { c.coords = v; });
        add("rhs", "'random' or a Matrix Market array file", [](RunConfig& c, auto&, auto& v) { c.rhs = v; });
        add("rhs-seed", "seed of the random right-hand side",
            [](RunConfig& c, auto& key, auto& v) { c.rhs_seed = static_cast<std::uint64_t>(to_integer(key, v)); });

        add("method", "outer solver: auto, pcg, bicgstab", [](RunConfig& c, auto& key, auto& v) {
            c.method = to_enum<MethodChoice>(
                key, v, {{"auto", MethodChoice::Auto}, {"pcg", MethodChoice::Pcg}, {"bicgstab", MethodChoice::BiCGstab}});
        });
        add("rtol", "relative residual tolerance", [](RunConfig& c, auto& key, auto& v) { c.rtol = to_real(key, v); });
        add("max-iters", "iteration cap",
            [](RunConfig& c, auto& key, auto& v) { c.max_iters = static_cast<int>(to_integer(key, v)); });

        add("nu1", "pre-smoothing steps",
            [](RunConfig& c, auto& key, auto& v) { c.amg.nu1 = static_cast<int>(to_integer(key, v)); });
        add("nu2", "post-smoothing steps",
            [](RunConfig& c, auto& key, auto& v) { c.amg.nu2 = static_cast<int>(to_integer(key, v)); });
        add("max-coarse", "size below which a level is solved directly",
            [](RunConfig& c, auto& key, auto& v) { c.amg.max_coarse = static_cast<index_t>(to_integer(key, v)); });
        add("max-levels", "level cap",
            [](RunConfig& c, auto& key, auto& v) { c.amg.max_levels = static_cast<int>(to_integer(key, v)); });
        add("stall-fraction", "stop coarsening when n_c >= fraction * n",
            [](RunConfig& c, auto& key, auto& v) { c.amg.stall_fraction = to_real(key, v); });
        add("coarsen-seed", "coarsening seed", [](RunConfig& c, auto& key, auto& v) {
            c.amg.seed = static_cast<std::uint64_t>(to_integer(key, v));
        });

        add("smoother-kind", "jacobi or fsai", [](RunConfig& c, auto& key, auto& v) {
            c.amg.smoother = to_enum<SmootherKind>(key, v, {{"jacobi", SmootherKind::Jacobi}, {"fsai", SmootherKind::Fsai}});
        });
        add("fsai-nsteps", "FSAI pattern growth steps",
            [](RunConfig& c, auto& key, auto& v) { c.amg.fsai.nsteps = static_cast<int>(to_integer(key, v)); });
        add("fsai-candidates", "FSAI entries added per row and step", [](RunConfig& c, auto& key, auto& v) {
            c.amg.fsai.candidates_per_step = static_cast<int>(to_integer(key, v));
        });
        add("fsai-density", "stop growing G once nnz(G)/nnz(tril(A)) exceeds this",
            [](RunConfig& c, auto& key, auto& v) { c.amg.fsai.target_density = to_real(key, v); });
        add("relax-target", "omega * rho target (default 0.9 jacobi, 1.0 fsai)",
            [](RunConfig& c, auto& key, auto& v) { c.amg.relax.target = to_real(key, v); });
        add("power-iters", "power iterations for the spectral radius estimate",
            [](RunConfig& c, auto& key, auto& v) { c.amg.relax.power_iters = static_cast<int>(to_integer(key, v)); });

        add("soc-kind", "classical, strong-coupling or affinity", [](RunConfig& c, auto& key, auto& v) {
            c.amg.soc = to_enum<SocKind>(key, v,
                                         {{"classical", SocKind::Classical},
                                          {"strong-coupling", SocKind::StrongCoupling},
                                          {"affinity", SocKind::Affinity}});
        });
        add("soc-theta", "strength threshold",
            [](RunConfig& c, auto& key, auto& v) { c.amg.soc_filter = FilterRule::threshold(to_real(key, v)); });
        add("soc-avg-degree", "keep the strongest n*d edges instead of thresholding",
            [](RunConfig& c, auto& key, auto& v) { c.amg.soc_filter = FilterRule::avg_degree(to_real(key, v)); });

        add("interp-kind", "classical, extended-i, hybrid or bamg", [](RunConfig& c, auto& key, auto& v) {
            c.amg.interp = to_enum<InterpKind>(key, v,
                                               {{"classical", InterpKind::Classical},
                                                {"extended-i", InterpKind::ExtendedI},
                                                {"hybrid", InterpKind::Hybrid},
                                                {"bamg", InterpKind::Bamg}});
        });
        add("bamg-lmin", "initial interpolation distance",
            [](RunConfig& c, auto& key, auto& v) { c.amg.bamg.l_min = static_cast<int>(to_integer(key, v)); });
        add("bamg-lmax", "maximum interpolation distance",
            [](RunConfig& c, auto& key, auto& v) { c.amg.bamg.l_max = static_cast<int>(to_integer(key, v)); });
        add("bamg-eps", "accepted relative fit residual",
            [](RunConfig& c, auto& key, auto& v) { c.amg.bamg.eps = to_real(key, v); });
        add("bamg-mu", "accepted weight norm", [](RunConfig& c, auto& key, auto& v) { c.amg.bamg.mu = to_real(key, v); });
        add("smooth-prolongation", "on or off",
            [](RunConfig& c, auto& key, auto& v) { c.amg.smooth_prolongation = to_switch(key, v); });
        add("smooth-omega", "damping of the prolongation smoothing",
            [](RunConfig& c, auto& key, auto& v) { c.amg.smooth_omega = to_real(key, v); });
        add("filter-target", "none, prolongation, operator or both", [](RunConfig& c, auto& key, auto& v) {
            c.amg.filter_target = to_enum<FilterTarget>(key, v,
                                                        {{"none", FilterTarget::None},
                                                         {"prolongation", FilterTarget::Prolongation},
                                                         {"operator", FilterTarget::Operator},
                                                         {"both", FilterTarget::Both}});
        });
        add("filter-rho", "fraction of each row's absolute sum to keep",
            [](RunConfig& c, auto& key, auto& v) { c.amg.filter_rho = to_real(key, v); });

        add("testspace-kind", "constant, rigid-body, srqm or srqm-from-analytic", [](RunConfig& c, auto& key, auto& v) {
            c.amg.testspace = to_enum<TestSpaceKind>(key, v,
                                                     {{"constant", TestSpaceKind::Constant},
                                                      {"rigid-body", TestSpaceKind::RigidBody},
                                                      {"srqm", TestSpaceKind::Srqm},
                                                      {"srqm-from-analytic", TestSpaceKind::SrqmFromAnalytic}});
        });
        add("srqm-iters", "test-space refinement iterations per level",
            [](RunConfig& c, auto& key, auto& v) { c.amg.srqm_iters = static_cast<int>(to_integer(key, v)); });
        add("n-test-vectors", "columns of a random SRQM start",
            [](RunConfig& c, auto& key, auto& v) { c.amg.n_test_vectors = static_cast<int>(to_integer(key, v)); });

        add("report", "report output path (stdout when empty)", [](RunConfig& c, auto&, auto& v) { c.report = v; });
        add("format", "text, json or csv", [](RunConfig& c, auto& key, auto& v) {
            if (v != "text" && v != "json" && v != "csv")
                throw Error("key '" + key + "': '" + v + "' is not one of text, json, csv");
            c.format = v;
        });
        add("history", "residual history CSV path", [](RunConfig& c, auto&, auto& v) { c.history = v; });
        add("threads", "worker threads (1 = deterministic)",
            [](RunConfig& c, auto& key, auto& v) { c.threads = static_cast<int>(to_integer(key, v)); });
        return k;
    }();
    return keys;
}

} // namespace

void RunConfig::validate() const {
    if (matrix.empty() == generator.empty())
        throw Error("exactly one input is required: give either a matrix file or a generator spec");
    if (!(rtol > 0.0))
        throw Error("rtol must be positive");
    if (max_iters < 1)
        throw Error("max-iters must be at least 1");
    if (threads < 1)
        throw Error("threads must be at least 1");
    amg.validate();
    const bool op_filter = amg.filter_target == FilterTarget::Operator || amg.filter_target == FilterTarget::Both;
    if (method == MethodChoice::Pcg && op_filter)
        throw Error("recipe conflict: method pcg with filter-target " + std::string(to_string(amg.filter_target)) +
                    "; filtered coarse operators are no more guaranteed to be SPD, use method bicgstab or auto");
}

KrylovMethod RunConfig::resolved_method() const {
    switch (method) {
    case MethodChoice::Pcg: return KrylovMethod::Pcg;
    case MethodChoice::BiCGstab: return KrylovMethod::BiCGstab;
    case MethodChoice::Auto: break;
    }
    const bool op_filter = amg.filter_target == FilterTarget::Operator || amg.filter_target == FilterTarget::Both;
    return op_filter ? KrylovMethod::BiCGstab : KrylovMethod::Pcg;
}

const std::vector<KeyInfo>& known_keys() {
    static const std::vector<KeyInfo> infos = [] {
        std::vector<KeyInfo> v;
        for (const auto& e : registry())
            v.push_back(e.info);
        return v;
    }();
    return infos;
}

bool is_known_key(const std::string& key) {
    const auto& r = registry();
    return std::any_of(r.begin(), r.end(), [&](const KeyEntry& e) { return e.info.name == key; });
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& e : registry()) {
        if (e.info.name == key) {
            e.set(cfg, key, value);
            return;
        }
    }
    throw Error("unknown recipe key '" + key + "'");
}

void load_recipe(RunConfig& cfg, std::istream& in) {
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // strip comments outside quotes
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"')
                quoted = !quoted;
            else if (!quoted && (line[i] == '#' || line[i] == ';')) {
                line.resize(i);
                break;
            }
        }
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3)
                throw ParseError("malformed section header '" + line + "'", lineno);
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected key = value, got '" + line + "'", lineno);
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        std::string full = key;
        if (!section.empty() && is_known_key(section + "-" + key))
            full = section + "-" + key;
        if (!is_known_key(full))
            throw ParseError("unknown recipe key '" + key + "'" + (section.empty() ? "" : " in [" + section + "]"),
                             lineno);
        try {
            apply_key(cfg, full, value);
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(e.what(), lineno);
        }
    }
}

void load_recipe_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open recipe '" + path + "'");
    try {
        load_recipe(cfg, in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what(), 0);
    }
}

std::string env_name(const std::string& key) {
    std::string s = "CLAMG_";
    for (const char c : key)
        s += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

void apply_environment(RunConfig& cfg) {
    for (const auto& k : known_keys())
        if (const char* v = std::getenv(env_name(k.name).c_str()))
            apply_key(cfg, k.name, v);
}

} // namespace clamg
