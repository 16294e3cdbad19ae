#include <iostream>

#include "biot/cli.hpp"

int main(int argc, char** argv) {
    using namespace biot::cli;
    RunConfig config;
    try {
        config = parse_config(argc, argv);
    } catch (const HelpRequested& h) {
        std::cout << h.what();
        return ExitCode::ok;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ExitCode::failure;
    }
    return run(config, std::cout, std::cerr);
}
