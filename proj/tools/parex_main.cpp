#include <CLI11.hpp>

#include "parex/commands.hpp"

namespace {

std::vector<double> parse_point(const std::string& text) {
    std::vector<double> v;
    std::string token;
    std::stringstream ss(text);
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        v.push_back(std::stod(token));
    }
    return v;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"parex: small-time analytic expansions of parabolic transition densities"};
    app.require_subcommand(1);

    parex::CommandOptions opt;
    std::string y_text, x_text;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "problem config (JSON)")->required();
        sub->add_option("--y", y_text, "base point, comma separated");
        sub->add_option("--x", x_text, "evaluation point, comma separated");
        sub->add_option("--t", opt.t, "time");
        sub->add_option("--t1", opt.t1, "first composition time");
        sub->add_option("--t2", opt.t2, "second composition time");
        sub->add_option("--seed", opt.seed, "master RNG seed");
        sub->add_option("--out", opt.out_path, "output file");
        sub->add_flag("--diagnose", opt.diagnose, "run the empirical ratio diagnostic");
        sub->add_option("--compose", opt.compose,
                        "number of semigroup substeps for t beyond the horizon");
    };

    const char* names[] = {"expand", "horizon", "solve", "compose", "split-solve",
                           "validate"};
    const char* descs[] = {
        "compute and serialize an expansion at a base point",
        "print the certified convergence-horizon bound",
        "solve the Cauchy problem at (t, x) by quadrature or Monte Carlo",
        "evaluate a Chapman-Kolmogorov composition of two kernels",
        "run the alternating-direction splitting solver",
        "run the oracle validation suite",
    };
    for (int i = 0; i < 6; ++i) add_common(app.add_subcommand(names[i], descs[i]));

    CLI11_PARSE(app, argc, argv);

    opt.y = parse_point(y_text);
    opt.x = parse_point(x_text);
    std::string command = app.get_subcommands().front()->get_name();
    return parex::run_command(command, opt, nullptr);
}
