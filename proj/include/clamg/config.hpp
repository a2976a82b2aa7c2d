#ifndef CLAMG_CONFIG_HPP
#define CLAMG_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "clamg/hierarchy.hpp"
#include "clamg/krylov.hpp"

namespace clamg {

enum class MethodChoice { Auto, Pcg, BiCGstab };

struct RunConfig {
    std::string matrix;    ///< Matrix Market or binary path
    std::string generator; ///< generator spec, e.g. poisson7:16,16,16
    std::string coords;    ///< optional coordinates (Matrix Market array)
    std::string rhs = "random";
    std::uint64_t rhs_seed = 1;

    AmgConfig amg;
    MethodChoice method = MethodChoice::Auto;
    double rtol = 1e-8;
    int max_iters = 5000;

    std::string report;
    std::string format = "text";
    std::string history;
    int threads = 1;

    /// Input presence and cross-key conflicts.
    void validate() const;
    /// Auto selects BiCGstab exactly when coarse operators are filtered.
    KrylovMethod resolved_method() const;
};

struct KeyInfo {
    std::string name;
    std::string help;
};

/// Every recipe key, in a fixed order.
const std::vector<KeyInfo>& known_keys();
bool is_known_key(const std::string& key);

/// Sets one key from its textual value; throws Error on unknown keys or
/// values that do not parse.
void apply_key(RunConfig& cfg, const std::string& key, const std::string& value);

/// Flat key = value text with optional [section] headers. Inside section S
/// a key K resolves to "S-K" when that is a known key, else to K. '#' and
/// ';' start comments; values may be double-quoted.
void load_recipe(RunConfig& cfg, std::istream& in);
void load_recipe_file(RunConfig& cfg, const std::string& path);

/// Environment variable for a key: CLAMG_ + upper case, '-' -> '_'.
std::string env_name(const std::string& key);
/// Applies every CLAMG_* variable that names a known key.
void apply_environment(RunConfig& cfg);

} // namespace clamg

#endif // CLAMG_CONFIG_HPP
