#pragma once

// umbrella header: the whole verification engine

#include "cmg/contact.hpp"
#include "cmg/curvature.hpp"
#include "cmg/deform.hpp"
#include "cmg/fields.hpp"
#include "cmg/parser.hpp"
#include "cmg/report.hpp"
#include "cmg/sampling.hpp"
#include "cmg/scalar_field.hpp"
#include "cmg/scenarios.hpp"
#include "cmg/structure_file.hpp"
#include "cmg/version.hpp"
