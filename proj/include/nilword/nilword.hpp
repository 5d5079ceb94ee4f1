#pragma once

#include "nilword/arith.hpp"
#include "nilword/canonical.hpp"
#include "nilword/catalog.hpp"
#include "nilword/class2.hpp"
#include "nilword/distribution.hpp"
#include "nilword/error.hpp"
#include "nilword/group.hpp"
#include "nilword/word.hpp"
