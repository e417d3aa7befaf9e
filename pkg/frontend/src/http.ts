// Transport port. The browser build uses fetch; tests substitute a node:http
// implementation so the same client code runs in both places.

export interface HttpResponse {
  status: number;
  contentType: string;
  bodyText: string;
}

export interface HttpRequest {
  method: string;
  path: string;
  body?: Uint8Array | string;
  contentType?: string;
}

export interface Http {
  request(req: HttpRequest): Promise<HttpResponse>;
}

export class FetchHttp implements Http {
  constructor(private base: string = "") {}

  async request(req: HttpRequest): Promise<HttpResponse> {
    const headers: Record<string, string> = {};
    if (req.contentType) headers["content-type"] = req.contentType;
    const res = await fetch(this.base + req.path, {
      method: req.method,
      headers,
      // Uint8Array is a valid fetch body; the generic ArrayBufferLike
      // parameter on Uint8Array keeps newer TS lib.dom from seeing that.
      body: (req.body ?? null) as BodyInit | null,
    });
    return {
      status: res.status,
      contentType: res.headers.get("content-type") ?? "",
      bodyText: await res.text(),
    };
  }
}

export interface MultipartField {
  name: string;
  value: string | Uint8Array;
  filename?: string;
  type?: string;
}

// Hand-rolled multipart/form-data so the encoder works identically under
// browsers and node without relying on environment-specific FormData classes.
export function encodeMultipart(fields: MultipartField[]): {
  contentType: string;
  body: Uint8Array;
} {
  const boundary = "vizsmithform" + Math.random().toString(36).slice(2, 12);
  const enc = new TextEncoder();
  const parts: Uint8Array[] = [];
  for (const field of fields) {
    let head = `--${boundary}\r\nContent-Disposition: form-data; name="${field.name}"`;
    if (field.filename !== undefined) head += `; filename="${field.filename}"`;
    head += "\r\n";
    if (field.type) head += `Content-Type: ${field.type}\r\n`;
    head += "\r\n";
    parts.push(enc.encode(head));
    parts.push(typeof field.value === "string" ? enc.encode(field.value) : field.value);
    parts.push(enc.encode("\r\n"));
  }
  parts.push(enc.encode(`--${boundary}--\r\n`));
  const total = parts.reduce((n, p) => n + p.length, 0);
  const body = new Uint8Array(total);
  let offset = 0;
  for (const part of parts) {
    body.set(part, offset);
    offset += part.length;
  }
  return { contentType: `multipart/form-data; boundary=${boundary}`, body };
}
