// qlift: command-line front end. All work happens in qlift::cli::run_command.

#include <qlift/cli/run.hpp>

#include "CLI11.hpp"

#include <fstream>
#include <map>
#include <iostream>
#include <sstream>

namespace {

std::string read_input(const std::string& path) {
    std::ostringstream buf;
    if (path == "-") {
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    buf << in.rdbuf();
    return buf.str();
}

std::string summary(const std::string& name) {
    static const std::map<std::string, std::string> text = {
        {"check", "test pairwise Poisson involutivity"},
        {"quantize", "lift to commuting star series up to --order"},
        {"anomaly", "compute and try to cancel the anomaly of given lifts G"},
        {"cohomology", "graded Koszul cohomology dimensions (homogeneous systems)"},
        {"compare-form", "map a differential form to a Koszul cochain"},
        {"generate", "build an involutive system by shear transformations"},
        {"verify", "re-check a certificate from a quantize report"},
    };
    return text.at(name);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qlift: order-by-order quantisation of involutive polynomial systems"};
    app.require_subcommand(1);

    std::string input;
    std::string out;
    qlift::cli::Options options;

    for (const auto& name : qlift::cli::commands()) {
        auto* sub = app.add_subcommand(name, summary(name));
        sub->add_option("file", input, name == "verify" ? "certificate report (JSON), or - for stdin"
                                                        : "system file, or - for stdin")
            ->required();
        sub->add_option("--out", out, "write the report here instead of stdout");
        // every flag is accepted here; run_command rejects combinations a command does not use
        sub->add_option("--order", options.order, "quantize: target order L in hbar");
        sub->add_option("--degree-bound", options.degree_bound, "quantize, anomaly: degree bound for corrections");
        sub->add_option("--p", options.p, "cohomology: cochain degree (default: all)");
        sub->add_option("--max-degree", options.max_degree, "cohomology: largest internal degree (default 4)");
        sub->add_option("--seed", options.seed, "generate: random shear steps from this seed");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    std::string text;
    try {
        text = read_input(input);
    } catch (const std::exception& e) {
        std::cerr << "qlift: " << e.what() << "\n";
        return 1;
    }

    const auto outcome = qlift::cli::run_command(command, text, options);
    if (outcome.exit_code == 1) {
        const auto doc = nlohmann::json::parse(outcome.report);
        std::cerr << "qlift: " << (input == "-" ? "<stdin>" : input) << ": "
                  << doc["payload"].value("message", std::string("error")) << "\n";
    }
    qlift::cli::log(1, command + ": status " + nlohmann::json::parse(outcome.report)["status"].get<std::string>());

    if (out.empty()) {
        std::cout << outcome.report;
    } else {
        std::ofstream f(out, std::ios::binary);
        if (!f) {
            std::cerr << "qlift: cannot write " << out << "\n";
            return 1;
        }
        f << outcome.report;
    }
    return outcome.exit_code;
}
