/** Microphone capture with start/stop guards.
 *
 * Capture runs through MediaRecorder in whatever compressed format the
 * browser prefers; conversion to WAV happens on stop, before upload.
 */

import { audioBufferToWav } from './wav';

export type RecorderErrorCode = 'PermissionDenied' | 'DeviceUnavailable';

export class RecorderError extends Error {
  constructor(
    public readonly code: RecorderErrorCode,
    message: string,
  ) {
    super(message);
    this.name = 'RecorderError';
  }
}

export interface RecorderDeps {
  requestStream?: () => Promise<MediaStream>;
  createRecorder?: (stream: MediaStream) => MediaRecorder;
}

export class ConsultationRecorder {
  private stream: MediaStream | null = null;
  private recorder: MediaRecorder | null = null;
  private chunks: BlobPart[] = [];
  private readonly deps: Required<RecorderDeps>;

  constructor(deps: RecorderDeps = {}) {
    this.deps = {
      requestStream:
        deps.requestStream ?? (() => navigator.mediaDevices.getUserMedia({ audio: true })),
      createRecorder: deps.createRecorder ?? ((stream) => new MediaRecorder(stream)),
    };
  }

  get isRecording(): boolean {
    return this.recorder !== null;
  }

  async start(): Promise<void> {
    if (this.recorder) {
      return; // already recording; the second press is a no-op
    }
    try {
      this.stream = await this.deps.requestStream();
    } catch (cause) {
      throw toRecorderError(cause);
    }
    this.chunks = [];
    this.recorder = this.deps.createRecorder(this.stream);
    this.recorder.ondataavailable = (event: BlobEvent) => {
      if (event.data && event.data.size > 0) {
        this.chunks.push(event.data);
      }
    };
    this.recorder.start(1000); // local chunks every second
  }

  /** Stop and return the captured blob; null when nothing was recording. */
  async stop(): Promise<Blob | null> {
    const recorder = this.recorder;
    if (!recorder) {
      return null;
    }
    await new Promise<void>((resolve) => {
      recorder.onstop = () => resolve();
      recorder.stop();
    });
    this.stream?.getTracks().forEach((track) => track.stop());
    const blob = new Blob(this.chunks, { type: recorder.mimeType || 'audio/webm' });
    this.recorder = null;
    this.stream = null;
    this.chunks = [];
    return blob;
  }
}

/** Decode a captured blob and re-encode it as mono PCM-16 WAV. */
export async function blobToWav(
  blob: Blob,
  decode?: (data: ArrayBuffer) => Promise<AudioBuffer>,
): Promise<Blob> {
  const data = await blob.arrayBuffer();
  const decodeFn =
    decode ??
    ((bytes: ArrayBuffer) => {
      const AudioContextCtor =
        (globalThis as any).AudioContext ?? (globalThis as any).webkitAudioContext;
      const ctx = new AudioContextCtor();
      return ctx.decodeAudioData(bytes).finally(() => ctx.close());
    });
  const decoded = await decodeFn(data);
  return new Blob([audioBufferToWav(decoded)], { type: 'audio/wav' });
}

function toRecorderError(cause: unknown): RecorderError {
  const name = cause instanceof DOMException ? cause.name : '';
  if (name === 'NotAllowedError' || name === 'SecurityError') {
    return new RecorderError('PermissionDenied', 'microphone permission was denied');
  }
  return new RecorderError('DeviceUnavailable', `no usable microphone: ${String(cause)}`);
}
