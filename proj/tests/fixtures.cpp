#include "fixtures.hpp"

#include <filesystem>

namespace hfh::testing {

RunConfig standard_config(double k)
{
    RunConfig c;
    c.model = "standard_map";
    c.params = {{"k", k}};
    return c;
}

std::string step_dir()
{
    return (std::filesystem::temp_directory_path() / "hfh_test_steps").string();
}

const PipelineResult& standard_run()
{
    static const PipelineResult r = [] {
        RunConfig c = standard_config();
        c.wide_scan = true;
        std::filesystem::remove_all(step_dir());
        return run_pipeline(c, 7, step_dir());
    }();
    return r;
}

}  // namespace hfh::testing
