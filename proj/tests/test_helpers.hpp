#pragma once

#include <filesystem>
#include <string>

#include "madurl/extractor.hpp"

#ifndef MADURL_DATA_DIR
#define MADURL_DATA_DIR "data"
#endif

namespace testutil {

inline madurl::DataPaths data_paths() {
    const std::string dir = MADURL_DATA_DIR;
    return {dir + "/tld_snapshot.txt", dir + "/word_pos.tsv", dir + "/sensitive_words.txt",
            dir + "/suspicious_domains.txt", dir + "/homoglyphs.txt"};
}

inline const madurl::ExtractorResources& resources() {
    static const madurl::ExtractorResources res = madurl::ExtractorResources::load(data_paths());
    return res;
}

// Fresh scratch directory under the build tree.
inline std::string temp_dir(const std::string& tag) {
    auto path = std::filesystem::temp_directory_path() / ("madurl_test_" + tag);
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
    return path.string();
}

}  // namespace testutil
