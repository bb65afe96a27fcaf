import { renderConvergence } from "../figures.js";
import { runFigure } from "./common.js";

runFigure("fig-convergence", process.argv.slice(2), (csv) => renderConvergence(csv));
