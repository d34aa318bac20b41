#include <doctest.h>

#include <cstdlib>
#include <cstring>
#include <limits>

#include "fswc/config.hpp"

#include "fswc/io.hpp"

using namespace fswc;
using cli::ConfigMap;

TEST_CASE("config parsing: sections, comments, overrides") {
    ConfigMap cfg = ConfigMap::from_string(R"(
# comment
[potential]
model = gaussian
d = 2            # trailing comment
amplitude = 1.5

[lambda]
grid = 0.25 0.21 0.18
)");
    CHECK(cfg.get_str("potential.model", "") == "gaussian");
    CHECK(cfg.get_int("potential.d", 0) == 2);
    CHECK(cfg.get_real("potential.amplitude", 0) == 1.5);
    auto grid = cfg.get_real_list("lambda.grid");
    REQUIRE(grid.size() == 3);
    CHECK(grid[1] == 0.21);

    cfg.apply_override("potential.amplitude=2.0");
    CHECK(cfg.get_real("potential.amplitude", 0) == 2.0);

    CHECK_THROWS_AS(ConfigMap::from_string("novalue\n"), ConfigError);
    CHECK_THROWS_AS(cfg.apply_override("noequals"), ConfigError);
    CHECK_THROWS_AS(cfg.require_str("missing.key"), ConfigError);
}

TEST_CASE("potential and symbol builders validate") {
    ConfigMap cfg = ConfigMap::from_string("[potential]\nmodel = gaussian\nd = 2\n");
    Potential V = cli::potential_from_config(cfg);
    CHECK(V.model() == PotentialModel::GaussianRadial);
    KineticSymbol s = cli::symbol_from_config(cfg);
    CHECK(s.dim() == 2);

    ConfigMap bad = ConfigMap::from_string("[potential]\nmodel = nosuch\n");
    CHECK_THROWS_AS(cli::potential_from_config(bad), ConfigError);
    ConfigMap badtau = ConfigMap::from_string("[symbol]\ntau = 2.0\n");
    CHECK_THROWS_AS(cli::symbol_from_config(badtau), ConfigError);
}

TEST_CASE("float formatting round-trips and is canonical") {
    for (Real x : {1.0, 0.1, 1.0 / 3.0, 1e-300, 6.6260e-34, -0.0, 2e17}) {
        std::string s = format_double(x);
        CHECK(std::strtod(s.c_str(), nullptr) == x);
    }
    CHECK(format_double(std::numeric_limits<Real>::infinity()) == "inf");
    std::string h1 = fnv1a_hex("abc");
    CHECK(h1.size() == 16);
    CHECK(h1 == fnv1a_hex("abc"));
    CHECK(h1 != fnv1a_hex("abd"));
}
