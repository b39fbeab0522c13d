#pragma once

#include <string_view>

// Repository data files compiled into the library (see cmake/embed.cmake).
namespace smatv::embedded {

std::string_view builtin_catalog();
std::string_view case_study_tuning();

}  // namespace smatv::embedded
