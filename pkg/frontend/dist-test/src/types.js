/** Payload shapes of the evaluation service API. */
export function isDone(r) {
    return r.done === true;
}
export class ApiError extends Error {
    constructor(status, message) {
        super(message);
        this.status = status;
        this.name = "ApiError";
    }
}
