#pragma once

#include "greedyrec/csv.hpp"
#include "greedyrec/dictionary.hpp"
#include "greedyrec/errors.hpp"
#include "greedyrec/greedy.hpp"
#include "greedyrec/guarantees.hpp"
#include "greedyrec/projection.hpp"
#include "greedyrec/serialization.hpp"
#include "greedyrec/support.hpp"
#include "greedyrec/sweep.hpp"
#include "greedyrec/worstcase.hpp"
