// Command-line front end. Links only the C library interface.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "icolab.h"

namespace {

int exit_code_for(int status) {
    switch (status) {
        case ICO_OK: return 0;
        case ICO_E_CONFIG:
        case ICO_E_VALIDATION:
        case ICO_E_ARGUMENT: return 2;
        default: return 3; // numeric / internal
    }
}

bool write_file(const std::filesystem::path& path, const char* text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << text;
    return static_cast<bool>(out);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"icolab: causal order on branched spacetimes"};
    app.require_subcommand(1);

    CLI::App* run = app.add_subcommand("run", "run pipeline stages on a scenario config");
    std::string config_path;
    std::vector<std::string> stages;
    int trials = -1;
    long long seed = -1;
    std::string out_dir = ".";
    bool emit_plot_data = false;
    run->add_option("config", config_path, "scenario config (JSON)")->required();
    run->add_option("--stage", stages,
                    "stages to run: verdict|align|lightcones|sweep|protocol|all");
    run->add_option("--trials", trials, "invariance sweep trial count");
    run->add_option("--seed", seed, "random seed for the sweep");
    run->add_option("--out", out_dir, "output directory (default: current)");
    run->add_flag("--emit-plot-data", emit_plot_data,
                  "also write worldlines.csv and bloch.csv");

    CLI11_PARSE(app, argc, argv);

    ico_session* session = ico_session_new();
    int status = ico_load_config_file(session, config_path.c_str());
    if (status == ICO_OK && !stages.empty()) {
        std::string csv;
        for (const std::string& s : stages) {
            if (!csv.empty()) csv += ",";
            csv += s;
        }
        status = ico_set_stages(session, csv.c_str());
    }
    if (status == ICO_OK && trials >= 0) status = ico_set_trials(session, trials);
    if (status == ICO_OK && seed >= 0)
        status = ico_set_seed(session, static_cast<unsigned long long>(seed));
    if (status == ICO_OK) status = ico_run(session);

    if (status != ICO_OK) {
        std::cerr << "icolab: " << ico_last_error(session) << "\n";
        const int code = exit_code_for(status);
        ico_session_free(session);
        return code;
    }

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    const std::filesystem::path dir(out_dir);
    bool ok = write_file(dir / "result.json", ico_result_json(session));
    if (ok && emit_plot_data) {
        ok = write_file(dir / "worldlines.csv", ico_worldlines_csv(session)) &&
             write_file(dir / "bloch.csv", ico_bloch_csv(session));
    }
    if (!ok) {
        std::cerr << "icolab: cannot write outputs under " << out_dir << "\n";
        ico_session_free(session);
        return 3;
    }

    std::cout << ico_result_json(session);
    ico_session_free(session);
    return 0;
}
