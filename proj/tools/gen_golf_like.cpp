// Writes a synthetic golf-like top-m ranking file (and the true strengths).
//
//   gen_golf_like --out data.txt [--truth truth.txt] [--seed 7] [--entities 631]
//                 [--events 46] [--min-field 120] [--max-field 156] [--cut 70]

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "gpl/predictive.hpp"

int main(int argc, char** argv) {
    gpl::SyntheticSpec spec;
    std::uint64_t seed = 7;
    std::string out_path, truth_path;

    CLI::App app{"synthetic golf-like top-m rankings", "gen_golf_like"};
    app.add_option("--out", out_path, "ranking file to write")->required();
    app.add_option("--truth", truth_path, "file for the true theta values");
    app.add_option("--seed", seed);
    app.add_option("--entities", spec.entities);
    app.add_option("--events", spec.events);
    app.add_option("--min-field", spec.min_field);
    app.add_option("--max-field", spec.max_field);
    app.add_option("--cut", spec.cut, "position whose bucket ends the ranked part");
    CLI11_PARSE(app, argc, argv);

    try {
        const auto synth = gpl::synthetic_top_m_dataset(spec, seed);
        std::ofstream out(out_path);
        out << "# synthetic top-m rankings: " << spec.entities << " entities, " << spec.events
            << " events, seed " << seed << '\n'
            << gpl::serialize(synth.data);
        if (!truth_path.empty()) {
            std::ofstream truth(truth_path);
            for (std::size_t k = 0; k < synth.truth.size(); ++k) {
                char buf[64];
                std::snprintf(buf, sizeof buf, " %.17g\n", synth.truth[k]);
                truth << synth.data.entities.label(static_cast<gpl::EntityId>(k)) << buf;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
