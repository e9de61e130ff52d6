#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "ncf2fd/sweep.hpp"

// Exit codes: 0 success, 1 usage error, 2 runtime failure.
int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    ncf2fd::SweepSpec spec;
    try {
        spec = ncf2fd::parse_config(args);
    } catch (const ncf2fd::HelpRequested& h) {
        std::cout << h.what();
        return 0;
    } catch (const ncf2fd::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    }

    try {
        const auto rows = ncf2fd::run_sweep(spec);
        auto emit = [&](std::ostream& os) {
            if (spec.format == ncf2fd::SweepSpec::Format::csv)
                ncf2fd::emit_csv(rows, os, &spec);
            else
                ncf2fd::emit_json(rows, os);
        };
        if (spec.out_path == "-") {
            emit(std::cout);
        } else {
            std::ofstream out(spec.out_path, std::ios::binary);
            if (!out)
                throw std::runtime_error("cannot open output file: " + spec.out_path);
            emit(out);
            if (!out)
                throw std::runtime_error("write failed: " + spec.out_path);
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
