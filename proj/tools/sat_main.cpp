#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sat/csv.hpp"
#include "sat/kernels.hpp"
#include "sat/scenario.hpp"

namespace {

std::vector<std::string> split_values(const std::string& list) {
    std::vector<std::string> out;
    if (list.empty()) return out;
    std::size_t pos = 0;
    while (pos <= list.size()) {
        const std::size_t comma = list.find(',', pos);
        std::string tok =
            list.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        const auto l = tok.find_first_not_of(" \t");
        const auto r = tok.find_last_not_of(" \t");
        out.push_back(l == std::string::npos ? std::string() : tok.substr(l, r - l + 1));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coherent transport through a laser-dressed lattice impurity"};
    app.set_version_flag("--version", sat::io::engine_string());
    app.require_subcommand(1);

    bool serial = false;
    app.add_flag("--serial", serial,
                 "use the serial reference kernels (default: parallel, SAT_WORKERS threads)");

    std::string run_config, run_out;
    auto* run_cmd = app.add_subcommand("run", "run one scenario config");
    run_cmd->add_option("config", run_config, "JSON config file")->required();
    run_cmd->add_option("--out", run_out, "output directory (default: from the config)");

    std::string sw_config, sw_axis, sw_values, sw_out;
    auto* sweep_cmd = app.add_subcommand("sweep", "run a config once per axis value");
    sweep_cmd->add_option("config", sw_config, "JSON config file")->required();
    sweep_cmd->add_option("--axis", sw_axis, "dotted config path, e.g. channel.Omega")
        ->required();
    sweep_cmd->add_option("--values", sw_values, "comma-separated values")->required();
    sweep_cmd->add_option("--out", sw_out, "output directory (default: <config dir>-sweep)");

    std::string va_out;
    auto* val_cmd = app.add_subcommand("validate", "run the exact-engine comparison battery");
    val_cmd->add_option("--out", va_out, "output directory (default: oracle-validate-out)");

    CLI11_PARSE(app, argc, argv);

    const auto exec = serial ? sat::kernels::Exec::serial : sat::kernels::Exec::parallel;
    if (run_cmd->parsed()) return sat::scenario::run(run_config, run_out, exec);
    if (sweep_cmd->parsed())
        return sat::scenario::sweep(sw_config, sw_axis, split_values(sw_values), sw_out, exec);
    return sat::scenario::validate(va_out, exec);
}
