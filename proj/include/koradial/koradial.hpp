#pragma once

/// @file koradial.hpp
/// @brief Convenience header pulling in the whole library.

#include "koradial/error.hpp"
#include "koradial/grid.hpp"
#include "koradial/model.hpp"
#include "koradial/table.hpp"
#include "koradial/limits.hpp"
#include "koradial/transforms.hpp"
#include "koradial/picard.hpp"
#include "koradial/oracle.hpp"
#include "koradial/classifier.hpp"
