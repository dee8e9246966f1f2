#pragma once

#include <string>

namespace printmap::bundled {

// Text of data/alloys.json and data/elements.json as compiled into the
// library. When PRINTMAP_DATA_DIR is set, the files in that directory win.
std::string alloys_json();
std::string elements_json();

}  // namespace printmap::bundled
