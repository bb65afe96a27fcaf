import { renderExprByCircuit } from "../figures.js";
import { runFigure } from "./common.js";

runFigure("fig-expr", process.argv.slice(2), (csv) => renderExprByCircuit(csv));
