#!/usr/bin/env node
import { runBound } from "./cli";

process.exit(runBound(process.argv.slice(2)));
