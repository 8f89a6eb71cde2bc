/** Exit-code contract shared by every adapter: 0 ok, 2 validation, 3 model failure. */

export const EXIT_OK = 0;
export const EXIT_VALIDATION = 2;
export const EXIT_MODEL = 3;

export class ValidationError extends Error {
  exitCode = EXIT_VALIDATION;
}

export class ModelError extends Error {
  exitCode = EXIT_MODEL;
}

/** Run an adapter main() and translate errors into exit codes + stderr lines. */
export function runAdapter(main: () => void): never {
  try {
    main();
    process.exit(EXIT_OK);
  } catch (err) {
    const code =
      err instanceof ValidationError || err instanceof ModelError ? err.exitCode : EXIT_VALIDATION;
    const message = err instanceof Error ? err.message : String(err);
    process.stderr.write(`error: ${message}\n`);
    process.exit(code);
  }
}
