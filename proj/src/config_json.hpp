#ifndef TOBRA_CONFIG_JSON_HPP
#define TOBRA_CONFIG_JSON_HPP

#include <string>

#include "sigma_model.hpp"

namespace tobra {

// Document layout:
//   {
//     "dims": [2, 1, 2, 5],
//     "h_metric": [[1.0]],            // optional; omit for l = 0
//     "branes": [
//       {"color": "F4", "type": "electric", "index_set": [2, 3],
//        "lambda": [], "epsilon": -1, "charge": 1.0}
//     ]
//   }
BraneConfig config_from_json_text(const std::string& text);
BraneConfig config_from_json_file(const std::string& path);

std::string config_to_json_text(const BraneConfig& config);

} // namespace tobra

#endif
