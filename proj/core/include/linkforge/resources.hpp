#pragma once

#include <string_view>

// Data files from core/data compiled into the library.
namespace linkforge::resources {

std::string_view stopwords_de();
std::string_view stopwords_en();
std::string_view corporate_suffixes();
std::string_view compound_scores();

}  // namespace linkforge::resources
