#pragma once

// Built-in scenarios run by `--catalog`, written in the scenario file format.

#include <string>
#include <utility>
#include <vector>

#include "supercurve/scenario.hpp"

namespace supercurve {

inline const std::vector<std::pair<std::string, std::string>>& catalog_texts() {
    static const std::vector<std::pair<std::string, std::string>> texts{
        {"trivial-q1", R"(
[base]
q = 1
grassmann = beta
[bundle "O1"]
xi 0 = z^-1
[bundle "Z2"]
xi 0 = z^2
[run]
h0 O expect 2|2
h1 O expect 0|0
h0 O1 expect 4|4
h1 Z2 expect 2|2
h0-ber Z2 expect 2|2
duality-verify Z2
residue-suite 50
)"},
        {"split-O(-3)", R"(
[base]
q = 1
[curve]
chart 0: z -> z; theta1 -> z^-3*theta1
[run]
h0 O expect 1|0
h1 O expect 0|2
h0-ber O expect 0|2
serre O
duality-verify O
)"},
        {"split-O(-3)-beta", R"(
[base]
q = 1
grassmann = beta
[curve]
chart 0: z -> z; theta1 -> z^-3*theta1
[bundle "P"]
xi 0 = 1 + beta*theta1/z
[divisor "reduced"]
at 2 = z - 2
at 3 = 1/(z - 3)
[divisor "perturbed"]
at 1 = 1 + beta*theta1/(z - 1)^2
[divisor "sum"]
at 1 = 1 + beta*theta1/(z - 1)^2
at 2 = z - 2
at 3 = 1/(z - 3)
[divisor "nilpotent"]
at 1 = 1 + beta*theta1/(z - 1)
marked = 5
[divisor "principal"]
at 1 = (z - 1)*(z - 3)/(z - 2)^2 + beta*theta1*z^3/(z - 2)^4
at 2 = (z - 1)*(z - 3)/(z - 2)^2 + beta*theta1*z^3/(z - 2)^4
at 3 = (z - 1)*(z - 3)/(z - 2)^2 + beta*theta1*z^3/(z - 2)^4
[run]
h1 O expect 2|2
duality-verify O
duality-verify P
effective P expect false
degree sum expect 0
abel reduced
abel-check reduced
abel-check perturbed
abel-check sum
abel-check nilpotent
abel-check principal
)"},
        {"nonsplit-beta", R"(
[base]
q = 1
grassmann = beta
[curve]
chart 0: z -> z + beta*theta1/z^2; theta1 -> theta1/z^2 + beta/z
[divisor "reduced"]
at 1 = z - 1
at 2 = 1/(z - 2)
[divisor "decorated"]
at 1 = 1 + beta*theta1/(z - 1)
[divisor "two-point"]
at 1 = 1 + beta*theta1/(z - 1)^2
at 3 = 1 - beta*theta1/(z - 3)^2
[divisor "principal"]
at 1 = (z - 1)*(z - 3)/(z - 2)^2 - 2*beta*theta1/(z - 2)^3
at 2 = (z - 1)*(z - 3)/(z - 2)^2 - 2*beta*theta1/(z - 2)^3
at 3 = (z - 1)*(z - 3)/(z - 2)^2 - 2*beta*theta1/(z - 2)^3
[run]
h1 O expect 1|1
duality-verify O
degree reduced expect 0
abel-check reduced
abel-check decorated
abel-check two-point
abel-check principal
)"},
        {"grassmann2-q2", R"(
[base]
q = 2
grassmann = b1, b2
[bundle "Z2"]
xi 0 = z^2
[run]
h1 Z2 expect 8|8
duality-verify Z2
residue-suite 200
)"},
        {"split-q2", R"(
[base]
q = 2
grassmann = b1, b2
[curve]
chart 0: z -> z; theta1 -> theta1/z; theta2 -> theta2/z^2
[divisor "reduced"]
at 1 = (z - 1)^2
at 2 = (z - 2)^-2
[divisor "decorated"]
at 2 = 1 + b1*theta2/(z - 2)
[divisor "even-nilpotent"]
at 2 = 1 + b1*b2/(z - 2) + theta1*theta2/(z - 2)
[divisor "principal"]
at 1 = (z - 1)*(z - 3)/(z - 2)^2 + b1*theta2*z^2/(z - 2)^3
at 2 = (z - 1)*(z - 3)/(z - 2)^2 + b1*theta2*z^2/(z - 2)^3
at 3 = (z - 1)*(z - 3)/(z - 2)^2 + b1*theta2*z^2/(z - 2)^3
[run]
duality-verify O
abel-check reduced
abel-check decorated
abel-check even-nilpotent
abel-check principal
)"},
        {"eps", R"(
[base]
q = 1
even = eps:2
[curve]
chart 0: z -> z + eps/z; theta1 -> theta1/z^2
[bundle "L"]
xi 1 = z - 1
[run]
h1 L expect 0|4
duality-verify L
)"},
        {"effectivity-gap", R"(
[base]
q = 1
grassmann = beta
[curve]
chart 0: z -> z; theta1 -> theta1/z^2
[divisor "gap"]
at 1 = 1 + beta*theta1/(z - 1)
[divisor "generic"]
at 1 = (z - 1)*(1 + beta*theta1/(z - 1))
[divisor "negative"]
at 1 = 1/(z - 1)
[run]
duality-verify O
effective gap expect false
effective generic expect true
effective negative expect false
degree generic expect 1
)"},
    };
    return texts;
}

inline std::vector<Scenario> catalog() {
    std::vector<Scenario> out;
    for (const auto& [name, text] : catalog_texts()) out.push_back(parse_scenario(text, name));
    return out;
}

}  // namespace supercurve
