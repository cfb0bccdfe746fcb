#pragma once

#include "oem/model.hpp"
#include "oem/dynamics.hpp"
#include "oem/measures.hpp"
#include "oem/integrator.hpp"
#include "oem/harness.hpp"
#include "oem/config.hpp"
#include "oem/output.hpp"
