#include "cemkit.h"

#include <cstring>
#include <string>
#include <vector>

#include "cemkit/common.h"
#include "cemkit/compare.h"
#include "cemkit/ingest.h"
#include "cemkit/runner.h"
#include "cemkit/toy_system.h"

struct cemkit_system {
  cemkit::SystemData data;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <typename Fn>
cemkit_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const cemkit::ComparisonMismatch& e) {
    set_error(e.what());
    return CEMKIT_MISMATCH;
  } catch (const cemkit::InvalidParameter& e) {
    set_error(e.what());
    return CEMKIT_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    set_error(e.what());
    return CEMKIT_ERROR;
  } catch (...) {
    set_error("unknown error");
    return CEMKIT_ERROR;
  }
}

}  // namespace

extern "C" {

const char* cemkit_version(void) {
  static const std::string version = cemkit::tool_version();
  return version.c_str();
}

const char* cemkit_last_error(void) { return g_last_error.c_str(); }

cemkit_status cemkit_system_load(const char* directory, cemkit_system** out) {
  if (directory == nullptr || out == nullptr) {
    set_error("directory and out must be non-NULL");
    return CEMKIT_INVALID_ARGUMENT;
  }
  return guarded([&] {
    auto handle = new cemkit_system{cemkit::load_system(directory)};
    *out = handle;
    return CEMKIT_OK;
  });
}

void cemkit_system_free(cemkit_system* system) { delete system; }

int cemkit_system_zone_count(const cemkit_system* system) {
  return system == nullptr ? 0 : static_cast<int>(system->data.zones.size());
}

int cemkit_system_cluster_count(const cemkit_system* system) {
  return system == nullptr ? 0 : static_cast<int>(system->data.clusters.size());
}

int cemkit_system_hour_count(const cemkit_system* system) {
  return system == nullptr ? 0 : system->data.hour_count;
}

cemkit_status cemkit_validate(const char* directory, char* report, size_t report_len) {
  if (directory == nullptr) {
    set_error("directory must be non-NULL");
    return CEMKIT_INVALID_ARGUMENT;
  }
  return guarded([&]() -> cemkit_status {
    const auto findings = cemkit::validate_system_directory(directory);
    if (findings.empty()) return CEMKIT_OK;
    std::string text;
    for (const auto& f : findings) {
      text += f;
      text += '\n';
    }
    set_error(text);
    if (report != nullptr && report_len > 0) {
      std::strncpy(report, text.c_str(), report_len - 1);
      report[report_len - 1] = '\0';
    }
    return CEMKIT_ERROR;
  });
}

cemkit_status cemkit_plan(const char* system_dir, const char* scenario_path,
                          const char* config_path, const char* backend, int workers,
                          const char* out_dir) {
  if (system_dir == nullptr || scenario_path == nullptr || config_path == nullptr ||
      out_dir == nullptr) {
    set_error("system_dir, scenario_path, config_path and out_dir must be non-NULL");
    return CEMKIT_INVALID_ARGUMENT;
  }
  return guarded([&] {
    cemkit::run_plan_command(system_dir, scenario_path, config_path,
                             backend == nullptr ? "" : backend,
                             workers < 1 ? 1 : workers, out_dir);
    return CEMKIT_OK;
  });
}

cemkit_status cemkit_simulate(const char* system_dir, const char* scenario_path,
                              const char* plan_dir, const char* backend, int workers,
                              const char* out_dir) {
  if (system_dir == nullptr || scenario_path == nullptr || plan_dir == nullptr ||
      out_dir == nullptr) {
    set_error("system_dir, scenario_path, plan_dir and out_dir must be non-NULL");
    return CEMKIT_INVALID_ARGUMENT;
  }
  return guarded([&] {
    cemkit::run_simulate_command(system_dir, scenario_path, plan_dir,
                                 backend == nullptr ? "" : backend,
                                 workers < 1 ? 1 : workers, out_dir);
    return CEMKIT_OK;
  });
}

cemkit_status cemkit_compare(const char* const* run_dirs, size_t run_count,
                             double tolerance, const char* out_dir, int* pass_out) {
  if (run_dirs == nullptr || out_dir == nullptr || run_count < 2) {
    set_error("need at least two run directories and an output directory");
    return CEMKIT_INVALID_ARGUMENT;
  }
  return guarded([&]() -> cemkit_status {
    std::vector<std::string> dirs(run_dirs, run_dirs + run_count);
    const bool pass = cemkit::run_compare_command(dirs, tolerance, out_dir);
    if (pass_out != nullptr) *pass_out = pass ? 1 : 0;
    return CEMKIT_OK;
  });
}

cemkit_status cemkit_write_demo_kit(const char* directory) {
  if (directory == nullptr) {
    set_error("directory must be non-NULL");
    return CEMKIT_INVALID_ARGUMENT;
  }
  return guarded([&] {
    cemkit::toy::write_kit(directory);
    return CEMKIT_OK;
  });
}

}  // extern "C"
