/*
 * Copyright 2026 The mpds-verify Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include "symbol.hpp"
#include "system.hpp"
#include "config_space.hpp"
#include "explorer.hpp"
#include "ctl.hpp"
#include "local_check.hpp"
#include "games.hpp"
#include "fo.hpp"
#include "counters.hpp"
#include "gadgets.hpp"
#include "tm.hpp"
#include "json_io.hpp"
