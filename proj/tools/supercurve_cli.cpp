// Command-line runner for scenario files and the built-in catalog.
//
// Exit status: 0 when no result is FALSIFIED, 1 otherwise, 2 on usage or parse errors.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "supercurve/catalog.hpp"
#include "supercurve/report.hpp"

using namespace supercurve;

namespace {

std::string brief(const Json& r) {
    const std::string cmd = r["command"].get<std::string>();
    if (r.contains("error")) return r["error"].get<std::string>();
    if (r.contains("dims")) return std::to_string(r["dims"]["even"].get<int>()) + "|" + std::to_string(r["dims"]["odd"].get<int>());
    if (cmd == "duality-verify")
        return "h1 " + std::to_string(r["h1"]["even"].get<int>()) + "|" + std::to_string(r["h1"]["odd"].get<int>()) +
               (r["perfect"].get<bool>() ? ", perfect" : ", not perfect");
    if (cmd == "degree") return "degree " + std::to_string(r["degree"].get<int>());
    if (cmd == "abel") return r["zero"].get<bool>() ? "zero" : "nonzero";
    if (cmd == "abel-check")
        return std::string(r["zero"].get<bool>() ? "zero" : "nonzero") + ", " + (r["trivial"].get<bool>() ? "trivial" : "nontrivial");
    if (cmd == "effective") return r["effective"].get<bool>() ? "true" : "false";
    if (cmd == "residue-suite") return std::to_string(r["instances"].get<long>()) + " instances";
    if (cmd == "serre") return std::to_string(r["pairing"].size()) + " rows";
    return "";
}

void print_text(const Json& rep, std::ostream& os) {
    for (const auto& s : rep["scenarios"]) {
        os << "== " << s["name"].get<std::string>() << " (" << s["base"].get<std::string>() << ", q = " << s["q"].get<int>() << ")\n";
        for (const auto& r : s["results"])
            os << "  line " << r["line"].get<int>() << ": " << r["command"].get<std::string>() << " " << r["target"].get<std::string>() << " -> "
               << r["status"].get<std::string>() << " [" << brief(r) << "]\n";
    }
    const auto& sm = rep["summary"];
    os << "summary: COMPUTED " << sm["COMPUTED"].get<int>() << ", VERIFIED " << sm["VERIFIED"].get<int>() << ", FALSIFIED "
       << sm["FALSIFIED"].get<int>() << ", ERROR " << sm["ERROR"].get<int>() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"supercurve: cohomology, duality, divisors and the Abel map on super Riemann sphere models"};
    std::vector<std::string> scenario_files;
    bool use_catalog = false;
    RunOptions opt;
    std::string json_path;
    app.add_option("--scenario", scenario_files, "Scenario file (repeatable)")->check(CLI::ExistingFile);
    app.add_flag("--catalog", use_catalog, "Run the built-in catalog");
    app.add_option("--seed", opt.seed, "Seed for randomized suites")->capture_default_str();
    app.add_option("--bounds-scale", opt.bounds_scale, "Multiplier for truncation bounds")->check(CLI::Range(1, 16))->capture_default_str();
    app.add_option("--json", json_path, "Write the JSON report to this path ('-' for stdout)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    if (scenario_files.empty() && !use_catalog) {
        std::cerr << "error: nothing to run; pass --scenario FILE or --catalog\n";
        return 2;
    }

    std::vector<Scenario> scenarios;
    try {
        if (use_catalog) scenarios = catalog();
    } catch (const std::exception& e) {
        std::cerr << "error in catalog: " << e.what() << "\n";
        return 2;
    }
    for (const auto& f : scenario_files) {
        try {
            scenarios.push_back(load_scenario(f));
        } catch (const std::exception& e) {
            std::cerr << f << ": " << e.what() << "\n";
            return 2;
        }
    }

    Json rep = run_scenarios(scenarios, opt);
    if (json_path == "-") {
        std::cout << rep.dump(2) << "\n";
    } else {
        print_text(rep, std::cout);
        if (!json_path.empty()) {
            std::ofstream out(json_path);
            if (!out) {
                std::cerr << "error: cannot write " << json_path << "\n";
                return 2;
            }
            out << rep.dump(2) << "\n";
        }
    }
    return falsified_count(rep) == 0 ? 0 : 1;
}
